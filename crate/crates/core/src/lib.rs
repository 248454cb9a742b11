//! Numeric core for catchment-level prediction benchmarks.
//!
//! Everything in this crate is pure computation over in-memory data:
//! planar/spherical geometry, inverse-distance and kriging interpolation,
//! gradient-boosted regression trees, data-quality filters, and the
//! cross-validation protocol used to compare methods. File formats, the CLI,
//! and anything touching the filesystem live in the companion `geofm-bench`
//! crate.
//!
//! The crate is `no_std`-compatible (`--no-default-features`); it only needs
//! `alloc` and `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod eval;
pub mod gbt;
pub mod geo;
pub mod interp;
pub mod linalg;
mod math;
pub mod qc;
pub mod table;
