//! Extremality of phase POVMs: the discrete criterion, the corner-forcing
//! lemma for the all-ones matrix, band-limited decompositions of the
//! canonical density, and extreme points of the covariant-kernel elliptope.

mod corner;
mod discrete;
mod elliptope;
mod lambda;

pub use corner::{
    corner_forcing, ones_basis, ones_eigensystem, CornerCertificate, CornerMatrix, CornerOutcome,
};
pub use discrete::discrete_extremality;
pub use elliptope::elliptope_extremality;
pub use lambda::{
    band_limited_purity_scan, decompose_canonical, lambda_space, BandLimitedPurityScan,
    LambdaDirection, LambdaSpace, RealTrigPoly, TrigKind,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;
use crate::povm::{CovariantKernel, DiscretePOVM, PovmError};

/// Default relative cutoff for supports and singular values.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Added to `‖D_i‖₂` when sizing the witness step.
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExtremalityError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("perturbation sup-norm {sup} exceeds 1")]
    SupNormExceeded { sup: f64 },
    #[error("direction is not in the λ-space: {0}")]
    NotInLambdaSpace(String),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Two POVMs of the input's kind whose equal-weight mixture is the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Discrete {
        plus: DiscretePOVM,
        minus: DiscretePOVM,
        step: f64,
    },
    Kernel {
        plus: CovariantKernel,
        minus: CovariantKernel,
        step: f64,
    },
}

/// Spectral data around the support and rank cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityDiagnostics {
    /// Rank of each effect's (or the kernel's) support.
    pub support_ranks: Vec<usize>,
    /// Smallest retained eigenvalue relative to its matrix norm.
    pub min_kept_eigenvalue_ratio: Option<f64>,
    /// Largest discarded eigenvalue relative to its matrix norm.
    pub max_dropped_eigenvalue_ratio: Option<f64>,
    /// Real dimension of the perturbation domain.
    pub domain_dim: usize,
    /// Number of real linear constraints.
    pub constraint_rows: usize,
    /// Smallest singular value above the rank cutoff, relative to the largest.
    pub min_kept_singular_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub extremal: bool,
    pub kernel_dim: usize,
    pub witness: Option<Witness>,
    pub tolerance_used: f64,
    pub diagnostics: ExtremalityDiagnostics,
}

fn check_tol(tol: f64) -> Result<(), ExtremalityError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(ExtremalityError::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// `(min kept, max dropped)` eigenvalue ratios given an ascending spectrum.
fn eigen_gap(eigenvalues: &[f64], norm: f64, cutoff: f64) -> (Option<f64>, Option<f64>) {
    if norm == 0.0 {
        return (None, None);
    }
    let kept = eigenvalues
        .iter()
        .filter(|&&x| x > cutoff)
        .map(|x| x / norm)
        .fold(None, min_opt);
    let dropped = eigenvalues
        .iter()
        .filter(|&&x| x <= cutoff)
        .map(|x| x.abs() / norm)
        .fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x))));
    (kept, dropped)
}

fn min_opt(a: Option<f64>, x: f64) -> Option<f64> {
    Some(a.map_or(x, |a| a.min(x)))
}

fn merge_min(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn merge_max(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn min_kept_singular_ratio(basis: &crate::numerics::KernelBasis) -> Option<f64> {
    let smax = basis.sigma_max();
    if smax == 0.0 {
        return None;
    }
    basis
        .singular_values
        .iter()
        .filter(|&&s| s > basis.cutoff)
        .map(|s| s / smax)
        .fold(None, min_opt)
}
