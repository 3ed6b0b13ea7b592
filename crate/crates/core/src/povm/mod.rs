//! Phase POVMs: band-limited matrix densities on `[0, 2π)` and finite-outcome
//! effect sequences, with constructors, closed-form effects, verification
//! checks, binning and sampling.

mod checks;
mod density;
mod discrete;
mod interval;
mod sampling;

pub use checks::{
    check_covariance, check_discrete_covariance, check_normalization, check_positivity,
    check_positivity_with, grid_angles, min_grid_points, seeded_covariance_pairs, CovarianceReport,
    NormalizationReport, PositivityReport,
};
pub use density::{
    canonical_density, kernel_density, pm_decomposition, CovariantKernel, TrigMatrixDensity,
};
pub use discrete::{bin_to_discrete, is_pvm, pegg_barnett, DiscretePOVM, SUM_TOL};
pub use interval::Interval;
pub use sampling::{
    density_on_grid, periodic_trapezoid, sample_outcomes, sample_outcomes_with, CircularStats,
};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PovmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("mixing weight {0} is outside [0, 1]")]
    BadWeight(f64),
    #[error("outcome labels differ between the mixed POVMs")]
    OutcomeMismatch,
    #[error("invalid interval [{start}, {end}): need 0 ≤ a ≤ b ≤ 2π")]
    InvalidInterval { start: f64, end: f64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("density is not positive on the sampling grid (eigenvalue {min_eigenvalue:e} at θ = {theta})")]
    NegativeDensity { theta: f64, min_eigenvalue: f64 },
    #[error("grid of {grid_points} points is too coarse; at least {required} required")]
    GridTooCoarse { grid_points: usize, required: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
