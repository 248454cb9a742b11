//! Traditional geospatial baselines: inverse distance weighting and ordinary
//! kriging with a fitted spherical variogram, both operating on catchment
//! centroids.

use alloc::string::String;
use core::fmt;

use crate::geo::GeoPoint;

mod idw;
mod kriging;
mod variogram;

pub use idw::{idw_predict, IdwConfig};
pub use kriging::{kriging_predict, KrigingPrediction, KrigingSystem};
pub use variogram::{empirical_variogram, fit_spherical, EmpiricalVariogram, VariogramBin, VariogramModel};

/// One observation: a catchment centroid and its target value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub location: GeoPoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterpError {
    EmptyTrainingSet,
    InvalidInput(String),
    /// Variogram fitting could not produce a model.
    FitFailed(String),
    /// Kriging system stayed singular after the one-shot diagonal jitter.
    DuplicateLocation,
}

impl fmt::Display for InterpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterpError::EmptyTrainingSet => write!(f, "training set is empty"),
            InterpError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            InterpError::FitFailed(msg) => write!(f, "variogram fit failed: {msg}"),
            InterpError::DuplicateLocation => {
                write!(f, "kriging system singular (duplicate training locations?)")
            }
        }
    }
}

impl core::error::Error for InterpError {}
