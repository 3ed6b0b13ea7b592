//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::{ComplexMatrix, NumericsError, HERMITIAN_TOL};

/// Maximum number of full cyclic sweeps.
pub const SWEEP_BUDGET: usize = 64;

/// Converged once the off-diagonal Frobenius mass is below this fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigendecomposition `A = V diag(λ) V†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation `J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]` on the `(p, q)` plane
/// first removes the phase of `a_pq`, then applies the real symmetric Jacobi
/// rotation. The sweep order is fixed, so the result is deterministic.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let norm = a.frobenius_norm();
    let residual = a.hermiticity_residual();
    if residual > HERMITIAN_TOL * norm {
        return Err(NumericsError::NotHermitian { residual, norm });
    }

    let n = a.rows();
    let mut m: Vec<Complex64> = a.hermitian_part().as_slice().to_vec();
    let mut v: Vec<Complex64> = ComplexMatrix::identity(n).as_slice().to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let target = OFF_DIAGONAL_TOL * norm;

    let off_mass = |m: &[Complex64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m[idx(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = off_mass(&m) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < SWEEP_BUDGET {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = m[idx(p, p)].re;
                let aqq = m[idx(q, q)].re;
                // negligible against both diagonal entries: drop it
                if r <= f64::EPSILON * 1e-3 * app.abs().min(aqq.abs()) {
                    m[idx(p, q)] = Complex64::new(0.0, 0.0);
                    m[idx(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let s_phase = phase * s; // s·e^{iφ}
                let s_phase_conj = s_phase.conj(); // s·e^{−iφ}

                // columns: A ← A J
                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = akp * c - akq * s_phase_conj;
                    m[idx(k, q)] = akp * s_phase + akq * c;
                }
                // rows: A ← J† A
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = apk * c - aqk * s_phase;
                    m[idx(q, k)] = apk * s_phase_conj + aqk * c;
                }
                m[idx(p, q)] = Complex64::new(0.0, 0.0);
                m[idx(q, p)] = Complex64::new(0.0, 0.0);
                m[idx(p, p)].im = 0.0;
                m[idx(q, q)].im = 0.0;

                // V ← V J
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = vkp * c - vkq * s_phase_conj;
                    v[idx(k, q)] = vkp * s_phase + vkq * c;
                }
            }
        }
        converged = off_mass(&m) <= target;
    }
    if !converged {
        return Err(NumericsError::NoConvergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[idx(i, i)].re.total_cmp(&m[idx(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[idx(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[idx(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// PSD test: `(min λ ≥ −tol, min λ)`.
///
/// The minimum eigenvalue of a 0×0 matrix is reported as `+∞`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<(bool, f64), NumericsError> {
    let eig = hermitian_eig(a)?;
    let min = eig.min_eigenvalue().unwrap_or(f64::INFINITY);
    Ok((min >= -tol, min))
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_spectral_norm(a: &ComplexMatrix) -> Result<f64, NumericsError> {
    Ok(hermitian_eig(a)?.max_abs_eigenvalue())
}
