//! Dense complex linear algebra: Hermitian eigendecomposition, PSD tests,
//! and nullspaces of real-linear maps on Hermitian matrix spaces.

mod eigen;
mod kernel;
mod matrix;

pub use eigen::{
    hermitian_eig, hermitian_spectral_norm, is_psd, HermitianEigen, OFF_DIAGONAL_TOL, SWEEP_BUDGET,
};
pub use kernel::{real_kernel_basis, KernelBasis, RealMatrix};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;
use thiserror::Error;

/// Relative Hermiticity tolerance: `‖A − A†‖_F ≤ HERMITIAN_TOL · ‖A‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute PSD tolerance on the minimum eigenvalue.
pub const PSD_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for rank and kernel computations.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: ‖A − A†‖_F = {residual:e} with ‖A‖_F = {norm:e}")]
    NotHermitian { residual: f64, norm: f64 },
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Real dimension of the space of `d×d` Hermitian matrices.
pub const fn hermitian_real_dim(d: usize) -> usize {
    d * d
}

/// Isometric real coordinates of a Hermitian matrix: the diagonal, then
/// `√2·Re a_jk`, `√2·Im a_jk` for each `j < k`.
pub fn hermitian_to_real(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(m[(j, j)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(s * m[(j, k)].re);
            out.push(s * m[(j, k)].im);
        }
    }
    out
}

/// Inverse of [`hermitian_to_real`].
pub fn real_to_hermitian(v: &[f64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d, "coordinate vector has wrong length");
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = Complex64::new(v[j], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = Complex64::new(s * v[idx], s * v[idx + 1]);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Frobenius-orthonormal basis of the `d×d` Hermitian matrices, ordered to
/// match [`hermitian_to_real`] coordinates.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    (0..d * d)
        .map(|i| {
            let mut e = vec![0.0; d * d];
            e[i] = 1.0;
            real_to_hermitian(&e, d)
        })
        .collect()
}

/// Images `U E_b U†` of the [`hermitian_basis`] elements `E_b` of the
/// `r×r` Hermitian matrices, where `U` is `l×r`.
pub fn conjugated_hermitian_basis(u: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let (l, r) = (u.rows(), u.cols());
    let cols: Vec<Vec<Complex64>> = (0..r).map(|j| u.column(j)).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(r * r);
    for c in &cols {
        out.push(ComplexMatrix::outer(c, c));
    }
    for a in 0..r {
        for b in (a + 1)..r {
            let ab = ComplexMatrix::outer(&cols[a], &cols[b]);
            out.push(ComplexMatrix::from_fn(l, l, |i, j| {
                (ab[(i, j)] + ab[(j, i)].conj()) * s
            }));
            out.push(ComplexMatrix::from_fn(l, l, |i, j| {
                (ab[(i, j)] - ab[(j, i)].conj()) * Complex64::new(0.0, s)
            }));
        }
    }
    out
}

/// Columns of `eig.eigenvectors` whose eigenvalues exceed `cutoff`.
pub fn support_columns(eig: &HermitianEigen, cutoff: f64) -> ComplexMatrix {
    let keep: Vec<usize> = (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > cutoff)
        .collect();
    ComplexMatrix::from_fn(eig.dim(), keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn embedding_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = testing::random_hermitian(&mut rng, 4);
        let v = hermitian_to_real(&a);
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((nv - a.frobenius_norm()).abs() < 1e-14);
        assert!(real_to_hermitian(&v, 4).max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = hermitian_basis(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = x.adjoint().matmul(y).trace();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-15 && ip.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conjugated_basis_matches_explicit_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let eig = hermitian_eig(&testing::random_hermitian(&mut rng, 4)).unwrap();
        let u = ComplexMatrix::from_fn(4, 2, |i, j| eig.eigenvectors[(i, j + 1)]);
        for (img, e) in conjugated_hermitian_basis(&u)
            .iter()
            .zip(hermitian_basis(2))
        {
            assert!(img.max_abs_diff(&u.matmul(&e).matmul(&u.adjoint())) < 1e-14);
        }
    }

    #[test]
    fn half_identity_pair_constraint_has_four_dim_kernel() {
        // (D1, D2) ↦ D1 + D2 over full-support Hermitian 2×2 blocks
        let d = 2;
        let cols: Vec<Vec<f64>> = hermitian_basis(d)
            .iter()
            .chain(hermitian_basis(d).iter())
            .map(hermitian_to_real)
            .collect();
        let l = RealMatrix::from_columns(d * d, &cols);
        assert_eq!(real_kernel_basis(&l, RANK_TOL).unwrap().dim(), 4);
    }
}
