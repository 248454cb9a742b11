//! Inverse distance weighting over the k nearest neighbours.

use alloc::format;
use alloc::vec::Vec;

use crate::geo::{DistanceMetric, GeoPoint};
use crate::math;

use super::{InterpError, SamplePoint};

/// Distance below which a query is treated as coinciding with a sample
/// (avoids dividing by zero while keeping the interpolator exact).
const EXACT_HIT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwConfig {
    pub power: f64,
    pub k: usize,
    pub metric: DistanceMetric,
}

impl Default for IdwConfig {
    fn default() -> Self {
        IdwConfig { power: 2.0, k: 6, metric: DistanceMetric::HaversineKm }
    }
}

/// Predicts at `query` from the `min(k, n)` nearest training points with
/// weights `d^(-power)`. A training point within [`EXACT_HIT_EPS`] of the
/// query short-circuits to that point's value.
pub fn idw_predict(train: &[SamplePoint], query: GeoPoint, cfg: &IdwConfig) -> Result<f64, InterpError> {
    if train.is_empty() {
        return Err(InterpError::EmptyTrainingSet);
    }
    if !(cfg.power > 0.0) {
        return Err(InterpError::InvalidInput(format!("power must be > 0, got {}", cfg.power)));
    }
    if cfg.k == 0 {
        return Err(InterpError::InvalidInput(format!("k must be >= 1, got {}", cfg.k)));
    }

    let mut by_distance: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, s)| (cfg.metric.distance(query, s.location), i))
        .collect();
    // Index tie-break keeps neighbour selection deterministic.
    by_distance.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let (nearest_d, nearest_i) = by_distance[0];
    if nearest_d < EXACT_HIT_EPS {
        return Ok(train[nearest_i].value);
    }

    let k = cfg.k.min(train.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for &(d, i) in &by_distance[..k] {
        let w = math::powf(d, -cfg.power);
        num += w * train[i].value;
        den += w;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(lon: f64, lat: f64, value: f64) -> SamplePoint {
        SamplePoint { location: GeoPoint { lon, lat }, value }
    }

    #[test]
    fn exact_hit_returns_sample_value() {
        let train = vec![pt(1.0, 1.0, 7.0), pt(2.0, 2.0, -3.0)];
        let v = idw_predict(&train, GeoPoint { lon: 1.0, lat: 1.0 }, &IdwConfig::default()).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn equidistant_pair_averages() {
        let train = vec![pt(-1.0, 0.0, 2.0), pt(1.0, 0.0, 4.0)];
        let v = idw_predict(&train, GeoPoint { lon: 0.0, lat: 0.0 }, &IdwConfig::default()).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hand_worked_two_point_case() {
        // Distances 1 km and 2 km, values 10 and 0, power 2:
        // weights 1 and 0.25 -> 10 / 1.25 = 8.0.
        let cfg = IdwConfig { power: 2.0, k: 6, metric: DistanceMetric::PlanarDegrees };
        let train = vec![pt(1.0, 0.0, 10.0), pt(2.0, 0.0, 0.0)];
        let v = idw_predict(&train, GeoPoint { lon: 0.0, lat: 0.0 }, &cfg).unwrap();
        assert_eq!(v, 8.0);
    }

    #[test]
    fn empty_train_rejected() {
        assert!(matches!(
            idw_predict(&[], GeoPoint { lon: 0.0, lat: 0.0 }, &IdwConfig::default()),
            Err(InterpError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn bad_parameters_rejected() {
        let train = vec![pt(1.0, 0.0, 1.0)];
        let q = GeoPoint { lon: 0.0, lat: 0.0 };
        let zero_power = IdwConfig { power: 0.0, ..IdwConfig::default() };
        assert!(idw_predict(&train, q, &zero_power).is_err());
        let zero_k = IdwConfig { k: 0, ..IdwConfig::default() };
        assert!(idw_predict(&train, q, &zero_k).is_err());
    }
}
