//! Numerical laboratory for cusp geometries carried by a two-generator
//! Schottky-type orbit model.
//!
//! The crate models a one-parameter family of warped cusp metrics, computes
//! Poincaré-type series over the associated orbit model, discretizes the
//! transfer operators whose leading eigenvalue governs those series, and
//! locates the critical stripe depth `a*` where the group switches from the
//! convergent to the divergent regime while its critical exponent stays
//! pinned at the parabolic value 1/2.
//!
//! Everything numeric is generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the `f64` instantiations are aliased at the crate root.

pub mod error;
pub mod geodesic;
pub mod model;
pub mod profiles;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod series;
pub mod solver;
pub mod transfer;
pub mod words;

pub use error::{Error, Result};
pub use real::Real;

/// f64 cusp profile.
pub type Profile = profiles::UProfile<f64>;
/// f64 cusp metric.
pub type Metric = profiles::CuspMetric<f64>;
/// f64 orbit model.
pub type Model = model::SchottkyModel<f64>;
/// f64 geodesic solution.
pub type Geodesic = geodesic::GeodesicSolution<f64>;
/// f64 series estimate.
pub type Series = series::SeriesEstimate<f64>;
/// f64 transfer matrix.
pub type Transfer = transfer::TransferMatrix<f64>;
/// f64 spectral data.
pub type Spectral = transfer::SpectralResult<f64>;
/// f64 continuation driver.
pub type Solver = solver::CriticalSolver<f64>;
/// f64 regime report.
pub type Regime = solver::RegimeReport<f64>;
