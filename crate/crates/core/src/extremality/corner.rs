//! Corner forcing: a PSD summand of a two-element decomposition of the
//! all-ones matrix is itself a multiple of the all-ones matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExtremalityError;
use crate::numerics::{is_psd, ComplexMatrix, HermitianEigen, NumericsError, HERMITIAN_TOL};

/// Analytic eigensystem of `1_s`: eigenvalue 0 (Helmert vectors) `s−1` times,
/// then eigenvalue `s` with the normalized all-ones vector. Ascending order.
pub fn ones_eigensystem(s: usize) -> HermitianEigen {
    let mut eigenvalues = vec![0.0; s.saturating_sub(1)];
    if s > 0 {
        eigenvalues.push(s as f64);
    }
    let basis = ones_basis(s);
    // move the all-ones column from the front to the back
    let eigenvectors = ComplexMatrix::from_fn(s, s, |i, j| basis[(i, (j + 1) % s)]);
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Real orthogonal `U_s` whose first column is `(1, …, 1)/√s`, followed by
/// the Helmert vectors; `U_s† 1_s U_s = diag(s, 0, …, 0)`.
pub fn ones_basis(s: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(s, s);
    if s == 0 {
        return u;
    }
    let inv = 1.0 / (s as f64).sqrt();
    for i in 0..s {
        u[(i, 0)] = Complex64::new(inv, 0.0);
    }
    for k in 1..s {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            u[(i, k)] = Complex64::new(norm, 0.0);
        }
        u[(k, k)] = Complex64::new(-(k as f64) * norm, 0.0);
    }
    u
}

/// Which matrix failed the positivity requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerMatrix {
    /// The candidate summand `G1`.
    Summand,
    /// Its complement `2·1_s − G1`.
    Complement,
}

/// Evidence that `G1` is not a scalar multiple of `1_s` inside a valid decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CornerCertificate {
    NegativeEigenvalue {
        matrix: CornerMatrix,
        eigenvalue: f64,
    },
    /// Entry of `U_s† G1 U_s` outside the `(0, 0)` corner.
    OffCornerEntry {
        row: usize,
        col: usize,
        magnitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CornerOutcome {
    /// `G1 = λ·1_s` with `λ ∈ [0, 2]`.
    ScalarMultiple {
        lambda: f64,
    },
    NotScalarMultiple {
        certificate: CornerCertificate,
    },
}

/// Verifies that `G1` and `2·1_s − G1` are PSD, rotates into the all-ones
/// eigenbasis and checks that only the `(0, 0)` corner survives.
///
/// `tol` is absolute and applies to both the PSD tests and the off-corner entries.
pub fn corner_forcing(g1: &ComplexMatrix, tol: f64) -> Result<CornerOutcome, ExtremalityError> {
    if !g1.is_square() || g1.rows() == 0 {
        return Err(ExtremalityError::InvalidInput(
            "G1 must be a non-empty square matrix".into(),
        ));
    }
    let residual = g1.hermiticity_residual();
    let norm = g1.frobenius_norm();
    if residual > HERMITIAN_TOL * norm {
        return Err(NumericsError::NotHermitian { residual, norm }.into());
    }
    let s = g1.rows();
    let g1 = g1.hermitian_part();

    let (ok, min) = is_psd(&g1, tol)?;
    if !ok {
        return Ok(negative(CornerMatrix::Summand, min));
    }
    let complement = &ComplexMatrix::ones(s).scale_real(2.0) - &g1;
    let (ok, min) = is_psd(&complement, tol)?;
    if !ok {
        return Ok(negative(CornerMatrix::Complement, min));
    }

    let u = ones_basis(s);
    let rotated = u.adjoint().matmul(&g1).matmul(&u);
    let mut worst = (0, 0, 0.0f64);
    for i in 0..s {
        for j in 0..s {
            if (i, j) != (0, 0) && rotated[(i, j)].norm() > worst.2 {
                worst = (i, j, rotated[(i, j)].norm());
            }
        }
    }
    if worst.2 > tol {
        return Ok(CornerOutcome::NotScalarMultiple {
            certificate: CornerCertificate::OffCornerEntry {
                row: worst.0,
                col: worst.1,
                magnitude: worst.2,
            },
        });
    }
    Ok(CornerOutcome::ScalarMultiple {
        lambda: rotated[(0, 0)].re / s as f64,
    })
}

fn negative(matrix: CornerMatrix, eigenvalue: f64) -> CornerOutcome {
    CornerOutcome::NotScalarMultiple {
        certificate: CornerCertificate::NegativeEigenvalue { matrix, eigenvalue },
    }
}
