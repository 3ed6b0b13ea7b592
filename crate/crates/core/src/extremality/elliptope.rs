use num_complex::Complex64;

use super::{
    check_tol, eigen_gap, min_kept_singular_ratio, ExtremalityDiagnostics, ExtremalityError,
    ExtremalityReport, Witness, TINY,
};
use crate::numerics::{
    conjugated_hermitian_basis, hermitian_eig, hermitian_spectral_norm, real_kernel_basis,
    support_columns, ComplexMatrix, RealMatrix,
};
use crate::povm::CovariantKernel;

/// Extremality of a covariant kernel within the unit-diagonal PSD matrices.
///
/// Perturbations are Hermitian `Δ = U H U†` with `U` spanning the range of `K`
/// (eigenvalues above `tol·‖K‖₂`) and `diag Δ = 0`. `K` is an extreme point
/// iff this space is trivial.
pub fn elliptope_extremality(
    k: &CovariantKernel,
    tol: f64,
) -> Result<ExtremalityReport, ExtremalityError> {
    check_tol(tol)?;
    let l = k.dim();
    let eig = hermitian_eig(k.matrix())?;
    let norm = eig.max_abs_eigenvalue();
    let cutoff = tol * norm;
    let (kept, dropped) = eigen_gap(&eig.eigenvalues, norm, cutoff);
    let u = support_columns(&eig, cutoff);
    let lambda_min = eig
        .eigenvalues
        .iter()
        .copied()
        .filter(|&x| x > cutoff)
        .fold(f64::INFINITY, f64::min);

    let basis = conjugated_hermitian_basis(&u);
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| (0..l).map(|i| e[(i, i)].re).collect())
        .collect();
    let map = RealMatrix::from_columns(l, &columns);
    let kernel = real_kernel_basis(&map, tol)?;

    let diagnostics = ExtremalityDiagnostics {
        support_ranks: vec![u.cols()],
        min_kept_eigenvalue_ratio: kept,
        max_dropped_eigenvalue_ratio: dropped,
        domain_dim: columns.len(),
        constraint_rows: l,
        min_kept_singular_ratio: min_kept_singular_ratio(&kernel),
    };
    let witness = match kernel.vectors.first() {
        Some(v) => build_witness(k, &basis, lambda_min, v)?,
        None => None,
    };
    Ok(ExtremalityReport {
        extremal: kernel.dim() == 0,
        kernel_dim: kernel.dim(),
        witness,
        tolerance_used: tol,
        diagnostics,
    })
}

fn build_witness(
    k: &CovariantKernel,
    basis: &[ComplexMatrix],
    lambda_min: f64,
    v: &[f64],
) -> Result<Option<Witness>, ExtremalityError> {
    let l = k.dim();
    let mut delta = ComplexMatrix::zeros(l, l);
    for (e, &c) in basis.iter().zip(v) {
        delta = &delta + &e.scale_real(c);
    }
    let delta = delta.hermitian_part();
    let n = hermitian_spectral_norm(&delta)?;
    if n == 0.0 || !lambda_min.is_finite() {
        return Ok(None);
    }
    let step = 0.5 * lambda_min / (n + TINY);
    let shifted = |sign: f64| {
        let mut m = (k.matrix() + &delta.scale_real(sign * step)).hermitian_part();
        for i in 0..l {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        CovariantKernel::new(m)
    };
    Ok(match (shifted(1.0), shifted(-1.0)) {
        (Ok(plus), Ok(minus)) => Some(Witness::Kernel { plus, minus, step }),
        _ => None,
    })
}
