use num_complex::Complex64;

use super::{
    check_tol, eigen_gap, merge_max, merge_min, min_kept_singular_ratio, ExtremalityDiagnostics,
    ExtremalityError, ExtremalityReport, Witness, TINY,
};
use crate::numerics::{
    conjugated_hermitian_basis, hermitian_eig, hermitian_spectral_norm, hermitian_to_real,
    real_kernel_basis, support_columns, ComplexMatrix, RealMatrix,
};
use crate::povm::DiscretePOVM;

/// Extremality of a finite-outcome POVM.
///
/// Perturbations `D_i` are Hermitian matrices supported on the range of `A_i`
/// (eigenvalues above `tol·‖A_i‖₂`) with `Σ D_i = 0`. The POVM is extremal iff
/// this space is trivial; otherwise `{A_i ± ε D_i}` is returned as a witness.
pub fn discrete_extremality(
    p: &DiscretePOVM,
    tol: f64,
) -> Result<ExtremalityReport, ExtremalityError> {
    check_tol(tol)?;
    let d = p.dim();

    let mut blocks: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(p.len());
    let mut support_eigs: Vec<f64> = Vec::with_capacity(p.len());
    let mut diagnostics = ExtremalityDiagnostics {
        support_ranks: Vec::with_capacity(p.len()),
        min_kept_eigenvalue_ratio: None,
        max_dropped_eigenvalue_ratio: None,
        domain_dim: 0,
        constraint_rows: d * d,
        min_kept_singular_ratio: None,
    };
    for a in p.effects() {
        let eig = hermitian_eig(a)?;
        let norm = eig.max_abs_eigenvalue();
        let cutoff = tol * norm;
        let (kept, dropped) = eigen_gap(&eig.eigenvalues, norm, cutoff);
        diagnostics.min_kept_eigenvalue_ratio =
            merge_min(diagnostics.min_kept_eigenvalue_ratio, kept);
        diagnostics.max_dropped_eigenvalue_ratio =
            merge_max(diagnostics.max_dropped_eigenvalue_ratio, dropped);

        let u = support_columns(&eig, cutoff);
        diagnostics.support_ranks.push(u.cols());
        support_eigs.push(
            eig.eigenvalues
                .iter()
                .copied()
                .filter(|&x| x > cutoff)
                .fold(f64::INFINITY, f64::min),
        );
        blocks.push(conjugated_hermitian_basis(&u));
    }

    let columns: Vec<Vec<f64>> = blocks.iter().flatten().map(hermitian_to_real).collect();
    diagnostics.domain_dim = columns.len();
    let map = RealMatrix::from_columns(d * d, &columns);
    let kernel = real_kernel_basis(&map, tol)?;
    diagnostics.min_kept_singular_ratio = min_kept_singular_ratio(&kernel);

    let witness = match kernel.vectors.first() {
        Some(v) => build_witness(p, &blocks, &support_eigs, v)?,
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
    p: &DiscretePOVM,
    blocks: &[Vec<ComplexMatrix>],
    support_eigs: &[f64],
    v: &[f64],
) -> Result<Option<Witness>, ExtremalityError> {
    let d = p.dim();
    let mut coords = v.iter();
    let mut perturbations = Vec::with_capacity(blocks.len());
    for block in blocks {
        let mut di = ComplexMatrix::zeros(d, d);
        for e in block {
            let c = *coords.next().expect("kernel vector matches domain");
            di = &di + &e.scale_real(c);
        }
        perturbations.push(di.hermitian_part());
    }

    let mut step = f64::INFINITY;
    for (di, &lmin) in perturbations.iter().zip(support_eigs) {
        let n = hermitian_spectral_norm(di)?;
        if n > 0.0 {
            step = step.min(lmin / (n + TINY));
        }
    }
    if !step.is_finite() {
        return Ok(None);
    }
    let step = 0.5 * step;

    let shifted = |sign: f64| -> Vec<ComplexMatrix> {
        p.effects()
            .iter()
            .zip(&perturbations)
            .map(|(a, di)| (a + &di.scale(Complex64::new(sign * step, 0.0))).hermitian_part())
            .collect()
    };
    let plus = DiscretePOVM::new(shifted(1.0), p.labels().to_vec());
    let minus = DiscretePOVM::new(shifted(-1.0), p.labels().to_vec());
    Ok(match (plus, minus) {
        (Ok(plus), Ok(minus)) => Some(Witness::Discrete { plus, minus, step }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{bin_to_discrete, canonical_density, pegg_barnett};

    fn half_identity_pair(d: usize) -> DiscretePOVM {
        let h = ComplexMatrix::identity(d).scale_real(0.5);
        DiscretePOVM::new(vec![h.clone(), h], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn pegg_barnett_is_extremal() {
        for l in 1..=8 {
            let r = discrete_extremality(&pegg_barnett(l).unwrap(), 1e-9).unwrap();
            assert!(r.extremal, "l={l}");
            assert_eq!(r.kernel_dim, 0);
            assert!(r.witness.is_none());
        }
    }

    #[test]
    fn computational_basis_is_extremal() {
        let p = DiscretePOVM::new(
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        assert!(discrete_extremality(&p, 1e-9).unwrap().extremal);
    }

    #[test]
    fn half_identity_has_four_dim_kernel_and_valid_witness() {
        let p = half_identity_pair(2);
        let r = discrete_extremality(&p, 1e-9).unwrap();
        assert!(!r.extremal);
        assert_eq!(r.kernel_dim, 4);
        match r.witness {
            Some(Witness::Discrete { plus, minus, step }) => {
                assert!(step > 0.0);
                let mixed = DiscretePOVM::mix(0.5, &plus, &minus).unwrap();
                assert!(mixed.effect_distance(&p) <= 1e-10);
                assert!(plus.effect_distance(&p) > 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coarse_binning_is_not_extremal() {
        // four bins on dim 3: rank-3 effects, 36 unknowns against 9 constraints
        let p = bin_to_discrete(&canonical_density(3).unwrap(), 4).unwrap();
        let r = discrete_extremality(&p, 1e-9).unwrap();
        assert!(!r.extremal);
        assert!(r.witness.is_some());
    }

    #[test]
    fn diagnostics_report_support_gap() {
        let r = discrete_extremality(&pegg_barnett(4).unwrap(), 1e-9).unwrap();
        assert_eq!(r.diagnostics.support_ranks, vec![1; 4]);
        assert!((r.diagnostics.min_kept_eigenvalue_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.diagnostics.max_dropped_eigenvalue_ratio.unwrap() < 1e-12);
        assert_eq!(r.diagnostics.domain_dim, 4);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(discrete_extremality(&pegg_barnett(2).unwrap(), 0.0).is_err());
    }
}
