//! Normalization, positivity and covariance checks for matrix densities.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DiscretePOVM, Interval, PovmError, TrigMatrixDensity};
use crate::exec::Exec;
use crate::fock::phase_shift_unitary;
use crate::numerics::hermitian_eig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub passed: bool,
    /// `max_{n,m} |(C_{m−n})_{nm} − δ_{nm}|`.
    pub violation: f64,
}

/// Exact algebraic test of `(C_{m−n})_{nm} = δ_{nm}` for all `n, m < l`.
pub fn check_normalization(d: &TrigMatrixDensity) -> NormalizationReport {
    let l = d.dim();
    let mut violation: f64 = 0.0;
    for n in 0..l {
        for m in 0..l {
            let q = m as i64 - n as i64;
            let want = if n == m { 1.0 } else { 0.0 };
            let got = d.coefficient_entry(q, n, m);
            violation = violation.max((got.re - want).hypot(got.im));
        }
    }
    NormalizationReport {
        passed: violation == 0.0,
        violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub passed: bool,
    /// Grid angle attaining the smallest eigenvalue of `G(θ)`.
    pub worst_theta: f64,
    pub min_eigenvalue: f64,
    pub grid_points: usize,
    pub tolerance: f64,
    /// Always `"grid-certified"`: positivity is verified on the uniform grid only.
    pub method: String,
}

/// Smallest grid size accepted for a density of the given band.
pub fn min_grid_points(band: usize) -> usize {
    4 * (band + 1)
}

/// Uniform grid `θ_j = 2πj/N`.
pub fn grid_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

pub fn check_positivity(
    d: &TrigMatrixDensity,
    grid_points: usize,
    tol: f64,
) -> Result<PositivityReport, PovmError> {
    check_positivity_with(d, grid_points, tol, Exec::default())
}

/// Minimum eigenvalue of `G(θ)` over the uniform grid.
///
/// When every coefficient is a scalar multiple of `C_0` the spectrum at each
/// grid point is `f(θ)·spec(C_0)` and only one eigendecomposition is needed.
pub fn check_positivity_with(
    d: &TrigMatrixDensity,
    grid_points: usize,
    tol: f64,
    exec: Exec,
) -> Result<PositivityReport, PovmError> {
    let required = min_grid_points(d.band());
    if grid_points < required {
        return Err(PovmError::GridTooCoarse {
            grid_points,
            required,
        });
    }
    let angles = grid_angles(grid_points);
    let mins = match d.scalar_profile() {
        Some(profile) => {
            let eig = hermitian_eig(&d.coefficient(0))?;
            let lo = eig.eigenvalues.first().copied().unwrap_or(0.0);
            let hi = eig.eigenvalues.last().copied().unwrap_or(0.0);
            exec.map_slice(&angles, |&theta| {
                let f = scalar_profile_value(&profile, theta);
                (f * lo).min(f * hi)
            })
        }
        None => grid_min_eigenvalues(d, &angles, exec)?,
    };
    Ok(summarize(&angles, &mins, grid_points, tol))
}

pub(crate) fn grid_min_eigenvalues(
    d: &TrigMatrixDensity,
    angles: &[f64],
    exec: Exec,
) -> Result<Vec<f64>, PovmError> {
    exec.map_slice(angles, |&theta| {
        hermitian_eig(&d.evaluate(theta)).map(|e| e.min_eigenvalue().unwrap_or(f64::INFINITY))
    })
    .into_iter()
    .map(|r| r.map_err(PovmError::from))
    .collect()
}

fn scalar_profile_value(
    profile: &std::collections::BTreeMap<usize, num_complex::Complex64>,
    theta: f64,
) -> f64 {
    profile
        .iter()
        .map(|(&k, &c)| {
            if k == 0 {
                c.re
            } else {
                2.0 * (c * num_complex::Complex64::from_polar(1.0, k as f64 * theta)).re
            }
        })
        .sum()
}

fn summarize(angles: &[f64], mins: &[f64], grid_points: usize, tol: f64) -> PositivityReport {
    let (worst_idx, &min_eigenvalue) = mins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    PositivityReport {
        passed: min_eigenvalue >= -tol,
        worst_theta: angles[worst_idx],
        min_eigenvalue,
        grid_points,
        tolerance: tol,
        method: "grid-certified".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub passed: bool,
    /// Largest `‖U(φ) P(X) U(φ)† − P(X ⊕ φ)‖_F` over the tested pairs.
    pub max_residual: f64,
    pub pairs: usize,
    pub tolerance: f64,
}

/// Compares conjugated effects with effects of shifted intervals.
pub fn check_covariance(
    d: &TrigMatrixDensity,
    pairs: &[(f64, Interval)],
    tol: f64,
) -> CovarianceReport {
    let l = d.dim();
    let mut max_residual: f64 = 0.0;
    for (phi, x) in pairs {
        let u = phase_shift_unitary(*phi, l);
        let conjugated = d.effect(x).conjugate_by(&u);
        let mut shifted = crate::numerics::ComplexMatrix::zeros(l, l);
        for part in x.shifted(*phi) {
            shifted = &shifted + &d.effect(&part);
        }
        max_residual = max_residual.max(conjugated.frobenius_distance(&shifted));
    }
    CovarianceReport {
        passed: max_residual <= tol,
        max_residual,
        pairs: pairs.len(),
        tolerance: tol,
    }
}

/// Covariance of an `N`-outcome POVM under the cyclic shifts `φ_k = 2πk/N`:
/// `U(φ_k) A_j U(φ_k)† = A_{j+k mod N}`. Meaningful for equally spaced labels.
pub fn check_discrete_covariance(p: &DiscretePOVM, tol: f64) -> CovarianceReport {
    let n = p.len();
    let mut max_residual: f64 = 0.0;
    for k in 1..n {
        let u = phase_shift_unitary(TAU * k as f64 / n as f64, p.dim());
        for (j, a) in p.effects().iter().enumerate() {
            let residual = a
                .conjugate_by(&u)
                .frobenius_distance(&p.effects()[(j + k) % n]);
            max_residual = max_residual.max(residual);
        }
    }
    CovarianceReport {
        passed: max_residual <= tol,
        max_residual,
        pairs: n.saturating_sub(1) * n,
        tolerance: tol,
    }
}

/// Reproducible random `(φ, [a, b))` pairs for covariance checks.
pub fn seeded_covariance_pairs(seed: u64, count: usize) -> Vec<(f64, Interval)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let phi = rng.random_range(0.0..TAU);
            let mut a = rng.random_range(0.0..TAU);
            let mut b = rng.random_range(0.0..TAU);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            (
                phi,
                Interval::new(a, b).expect("ordered endpoints in [0, 2π)"),
            )
        })
        .collect()
}
