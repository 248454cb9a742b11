//! Ordinary kriging: best linear unbiased prediction with weights summing
//! to one, driven by a variogram model.
//!
//! The augmented system
//! ```text
//!   [ Gamma  1 ] [ w  ]   [ gamma(d(query, .)) ]
//!   [ 1^T    0 ] [ mu ] = [ 1                  ]
//! ```
//! is factored once per training set; each prediction is one solve.

use alloc::vec;
use alloc::vec::Vec;

use crate::geo::{DistanceMetric, GeoPoint};
use crate::linalg::{LinalgError, LuFactor};

use super::{InterpError, SamplePoint, VariogramModel};

/// Diagonal jitter applied once when the augmented matrix is singular
/// (near-duplicate centroids); a second failure is reported as duplicates.
const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KrigingPrediction {
    pub value: f64,
    /// One weight per training point; sums to 1 up to solver precision.
    pub weights: Vec<f64>,
}

/// A factored ordinary-kriging system over a fixed training set.
pub struct KrigingSystem {
    factor: LuFactor,
    train: Vec<SamplePoint>,
    model: VariogramModel,
    metric: DistanceMetric,
}

impl KrigingSystem {
    pub fn new(
        train: &[SamplePoint],
        model: VariogramModel,
        metric: DistanceMetric,
    ) -> Result<Self, InterpError> {
        if train.is_empty() {
            return Err(InterpError::EmptyTrainingSet);
        }
        let n = train.len();
        let m = n + 1;
        let mut a = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                a[i * m + j] = model.gamma(metric.distance(train[i].location, train[j].location));
            }
            a[i * m + n] = 1.0;
            a[n * m + i] = 1.0;
        }

        let factor = match LuFactor::new(a.clone(), m) {
            Ok(f) => f,
            Err(LinalgError::Singular) => {
                for i in 0..n {
                    a[i * m + i] += JITTER;
                }
                LuFactor::new(a, m).map_err(|_| InterpError::DuplicateLocation)?
            }
            Err(_) => return Err(InterpError::DuplicateLocation),
        };

        Ok(KrigingSystem { factor, train: train.to_vec(), model, metric })
    }

    pub fn predict(&self, query: GeoPoint) -> KrigingPrediction {
        let n = self.train.len();
        let mut rhs = Vec::with_capacity(n + 1);
        for s in &self.train {
            rhs.push(self.model.gamma(self.metric.distance(query, s.location)));
        }
        rhs.push(1.0);
        let sol = self.factor.solve(&rhs);
        let value = self
            .train
            .iter()
            .zip(&sol)
            .map(|(s, &w)| w * s.value)
            .sum();
        KrigingPrediction { value, weights: sol[..n].to_vec() }
    }
}

/// One-shot convenience wrapper around [`KrigingSystem`].
pub fn kriging_predict(
    train: &[SamplePoint],
    query: GeoPoint,
    model: VariogramModel,
    metric: DistanceMetric,
) -> Result<KrigingPrediction, InterpError> {
    Ok(KrigingSystem::new(train, model, metric)?.predict(query))
}
