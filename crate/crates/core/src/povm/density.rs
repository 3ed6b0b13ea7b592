//! Continuous-outcome POVMs on `[0, 2π)` with band-limited matrix densities.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Interval, PovmError};
use crate::fock::DensityOperator;
use crate::numerics::{is_psd, ComplexMatrix, HERMITIAN_TOL, PSD_TOL};

/// Matrix-valued trigonometric polynomial `G(θ) = Σ_{|k|≤B} C_k e^{ikθ}`.
///
/// Defines the POVM
/// `P(X)_{nm} = (1/2π) ∫_X g_{nm}(θ) e^{i(n−m)θ} dθ` with `g_{nm} = G_{nm}`.
/// Only `C_k` for `k ≥ 0` is stored; `C_{−k} = C_k†` by construction, so
/// `G(θ)` is Hermitian for every θ.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrixDensity {
    dim: usize,
    coeffs: BTreeMap<usize, ComplexMatrix>,
}

impl TrigMatrixDensity {
    /// Builds a density from its non-negative Fourier coefficients.
    ///
    /// `C_0` must be Hermitian; all-zero coefficients for `k > 0` are dropped.
    pub fn from_coefficients(
        dim: usize,
        coeffs: BTreeMap<usize, ComplexMatrix>,
    ) -> Result<Self, PovmError> {
        if dim == 0 {
            return Err(PovmError::ZeroDimension);
        }
        let mut stored = BTreeMap::new();
        for (k, c) in coeffs {
            if c.rows() != dim || c.cols() != dim {
                return Err(PovmError::DimMismatch {
                    expected: dim,
                    found: c.rows().max(c.cols()),
                });
            }
            if !c.is_finite() {
                return Err(PovmError::InvalidDensity(format!(
                    "non-finite entry in C_{k}"
                )));
            }
            if k == 0 {
                if c.hermiticity_residual() > HERMITIAN_TOL * c.frobenius_norm().max(1.0) {
                    return Err(PovmError::InvalidDensity("C_0 is not Hermitian".into()));
                }
                stored.insert(0, c.hermitian_part());
            } else if !c.is_zero() {
                stored.insert(k, c);
            }
        }
        stored
            .entry(0)
            .or_insert_with(|| ComplexMatrix::zeros(dim, dim));
        Ok(Self {
            dim,
            coeffs: stored,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest Fourier index with a non-zero coefficient.
    pub fn band(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Stored coefficients `C_k`, `k ≥ 0`.
    pub fn coefficients(&self) -> &BTreeMap<usize, ComplexMatrix> {
        &self.coeffs
    }

    /// `C_k` for any integer `k` (zero outside the band).
    pub fn coefficient(&self, k: i64) -> ComplexMatrix {
        match self.coeffs.get(&(k.unsigned_abs() as usize)) {
            Some(c) if k >= 0 => c.clone(),
            Some(c) => c.adjoint(),
            None => ComplexMatrix::zeros(self.dim, self.dim),
        }
    }

    /// `(C_k)_{nm}` for any integer `k`.
    #[inline]
    pub fn coefficient_entry(&self, k: i64, n: usize, m: usize) -> Complex64 {
        match self.coeffs.get(&(k.unsigned_abs() as usize)) {
            Some(c) if k >= 0 => c[(n, m)],
            Some(c) => c[(m, n)].conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `G(θ)`.
    pub fn evaluate(&self, theta: f64) -> ComplexMatrix {
        let mut g = self.coeffs[&0].clone();
        for (&k, c) in self.coeffs.range(1..) {
            let w = Complex64::from_polar(1.0, k as f64 * theta);
            let ca = c.adjoint();
            for n in 0..self.dim {
                for m in 0..self.dim {
                    g[(n, m)] += c[(n, m)] * w + ca[(n, m)] * w.conj();
                }
            }
        }
        g.hermitian_part()
    }

    /// If every `C_k` equals `f̂_k · C_0`, returns the scalar profile `f̂_k`
    /// (`k ≥ 0`, with `f̂_0 = 1`). Then `G(θ) = f(θ)·C_0` with real `f`.
    pub(crate) fn scalar_profile(&self) -> Option<BTreeMap<usize, Complex64>> {
        let c0 = &self.coeffs[&0];
        let (pivot, pivot_val) = c0
            .as_slice()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, z)| ((i / self.dim, i % self.dim), *z))?;
        if pivot_val.norm() == 0.0 {
            return None;
        }
        let mut profile = BTreeMap::new();
        profile.insert(0, Complex64::new(1.0, 0.0));
        for (&k, c) in self.coeffs.range(1..) {
            let ratio = c[pivot] / pivot_val;
            if c.frobenius_distance(&c0.scale(ratio)) > 1e-15 * c.frobenius_norm() {
                return None;
            }
            profile.insert(k, ratio);
        }
        Some(profile)
    }

    /// The effect `P([a, b))`, computed from closed-form Fourier integrals.
    pub fn effect(&self, interval: &Interval) -> ComplexMatrix {
        let l = self.dim;
        let b = self.band() as i64;
        let mut out = ComplexMatrix::zeros(l, l);
        for n in 0..l {
            for m in n..l {
                let shift = n as i64 - m as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for k in -b..=b {
                    let c = self.coefficient_entry(k, n, m);
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    acc += c * interval.fourier_integral(k + shift);
                }
                acc /= TAU;
                if n == m {
                    out[(n, n)] = Complex64::new(acc.re, 0.0);
                } else {
                    out[(n, m)] = acc;
                    out[(m, n)] = acc.conj();
                }
            }
        }
        out
    }

    /// Outcome density `p(θ) = (1/2π) Σ_{n,m} ϱ_{mn} g_{nm}(θ) e^{i(n−m)θ}`.
    pub fn prob_density(&self, rho: &DensityOperator, theta: f64) -> Result<f64, PovmError> {
        self.check_state_dim(rho)?;
        Ok(self.prob_density_unchecked(rho, theta))
    }

    pub(crate) fn check_state_dim(&self, rho: &DensityOperator) -> Result<(), PovmError> {
        if rho.dim() != self.dim {
            return Err(PovmError::DimMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn prob_density_unchecked(&self, rho: &DensityOperator, theta: f64) -> f64 {
        let g = self.evaluate(theta);
        let r = rho.matrix();
        let phases: Vec<Complex64> = (0..self.dim)
            .map(|n| Complex64::from_polar(1.0, n as f64 * theta))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..self.dim {
            for m in 0..self.dim {
                acc += r[(m, n)] * g[(n, m)] * phases[n] * phases[m].conj();
            }
        }
        acc.re / TAU
    }

    /// Coefficient-wise convex combination `t·self + (1−t)·other`.
    ///
    /// Entries on which both agree are copied, so identical coefficients
    /// (in particular exact normalization moments) survive bit-for-bit.
    pub fn mix(t: f64, a: &Self, b: &Self) -> Result<Self, PovmError> {
        check_weight(t)?;
        if a.dim != b.dim {
            return Err(PovmError::DimMismatch {
                expected: a.dim,
                found: b.dim,
            });
        }
        let zero = ComplexMatrix::zeros(a.dim, a.dim);
        let keys: std::collections::BTreeSet<usize> =
            a.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
        let mut coeffs = BTreeMap::new();
        for k in keys {
            let ca = a.coeffs.get(&k).unwrap_or(&zero);
            let cb = b.coeffs.get(&k).unwrap_or(&zero);
            coeffs.insert(k, mix_matrices(t, ca, cb));
        }
        Self::from_coefficients(a.dim, coeffs)
    }

    /// Largest entrywise coefficient difference, treating absent `C_k` as zero.
    pub fn coefficient_distance(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<usize> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .collect();
        keys.into_iter()
            .map(|k| {
                self.coefficient(k as i64)
                    .max_abs_diff(&other.coefficient(k as i64))
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_weight(t: f64) -> Result<(), PovmError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(PovmError::BadWeight(t));
    }
    Ok(())
}

pub(crate) fn mix_matrices(t: f64, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let (x, y) = (a[(i, j)], b[(i, j)]);
        if x == y {
            x
        } else {
            x * t + y * (1.0 - t)
        }
    })
}

/// Unit-diagonal PSD matrix `K`; the band-0 density `G ≡ K` is phase-shift covariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovariantKernel {
    matrix: ComplexMatrix,
}

impl CovariantKernel {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, PovmError> {
        let invalid = |msg: String| Err(PovmError::InvalidKernel(msg));
        if !matrix.is_square() || matrix.rows() == 0 {
            return invalid("kernel must be a non-empty square matrix".into());
        }
        if !matrix.is_finite() {
            return invalid("kernel has non-finite entries".into());
        }
        if matrix.hermiticity_residual() > HERMITIAN_TOL * matrix.frobenius_norm() {
            return invalid("kernel is not Hermitian".into());
        }
        for i in 0..matrix.rows() {
            if matrix[(i, i)] != Complex64::new(1.0, 0.0) {
                return invalid(format!(
                    "diagonal entry {i} is {} (must be exactly 1)",
                    matrix[(i, i)]
                ));
            }
        }
        let (psd, min) =
            is_psd(&matrix, PSD_TOL).map_err(|e| PovmError::InvalidKernel(e.to_string()))?;
        if !psd {
            return invalid(format!(
                "kernel is not positive semidefinite (minimum eigenvalue {min:e})"
            ));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// The all-ones kernel `1_l` (canonical phase measurement).
    pub fn all_ones(l: usize) -> Result<Self, PovmError> {
        Self::new(ComplexMatrix::ones(l))
    }

    /// The identity kernel (phase-blind uniform measurement).
    pub fn identity(l: usize) -> Result<Self, PovmError> {
        Self::new(ComplexMatrix::identity(l))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl<'de> Deserialize<'de> for CovariantKernel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        CovariantKernel::new(m).map_err(serde::de::Error::custom)
    }
}

/// Truncated canonical phase POVM: band 0, `C_0 = 1_l`.
pub fn canonical_density(l: usize) -> Result<TrigMatrixDensity, PovmError> {
    TrigMatrixDensity::from_coefficients(l, BTreeMap::from([(0, ComplexMatrix::ones(l))]))
}

/// Band-0 covariant density `G ≡ K`.
pub fn kernel_density(kernel: &CovariantKernel) -> TrigMatrixDensity {
    TrigMatrixDensity {
        dim: kernel.dim(),
        coeffs: BTreeMap::from([(0, kernel.matrix().clone())]),
    }
}

/// The pair with densities `[1 ± cos(lθ)]·1_l`, averaging to the canonical density.
pub fn pm_decomposition(l: usize) -> Result<(TrigMatrixDensity, TrigMatrixDensity), PovmError> {
    let ones = ComplexMatrix::ones(l);
    let plus = TrigMatrixDensity::from_coefficients(
        l,
        BTreeMap::from([(0, ones.clone()), (l, ones.scale_real(0.5))]),
    )?;
    let minus = TrigMatrixDensity::from_coefficients(
        l,
        BTreeMap::from([(0, ones.clone()), (l, ones.scale_real(-0.5))]),
    )?;
    Ok((plus, minus))
}

// JSON form: {"dim": l, "band": B, "coefficients": [[k, row, col, re, im], ...]},
// listing non-zero entries with k ≥ 0; negative indices follow from C_{−k} = C_k†.
#[derive(Serialize, Deserialize)]
struct DensityRepr {
    dim: usize,
    band: usize,
    coefficients: Vec<(i64, usize, usize, f64, f64)>,
}

impl Serialize for TrigMatrixDensity {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut coefficients = Vec::new();
        for (&k, c) in &self.coeffs {
            for n in 0..self.dim {
                for m in 0..self.dim {
                    let z = c[(n, m)];
                    if z.re != 0.0 || z.im != 0.0 {
                        coefficients.push((k as i64, n, m, z.re, z.im));
                    }
                }
            }
        }
        DensityRepr {
            dim: self.dim,
            band: self.band(),
            coefficients,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigMatrixDensity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = DensityRepr::deserialize(deserializer)?;
        let mut coeffs: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
        for (k, n, m, re, im) in repr.coefficients {
            if k < 0 {
                return Err(D::Error::custom(
                    "negative Fourier indices are implied by C_{-k} = C_k† and must be omitted",
                ));
            }
            if k as usize > repr.band {
                return Err(D::Error::custom(format!(
                    "coefficient index {k} exceeds band {}",
                    repr.band
                )));
            }
            if n >= repr.dim || m >= repr.dim {
                return Err(D::Error::custom(format!(
                    "entry ({n}, {m}) outside dimension {}",
                    repr.dim
                )));
            }
            let c = coeffs
                .entry(k as usize)
                .or_insert_with(|| ComplexMatrix::zeros(repr.dim, repr.dim));
            c[(n, m)] = Complex64::new(re, im);
        }
        TrigMatrixDensity::from_coefficients(repr.dim, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_state, StateSpec};
    use std::f64::consts::PI;

    #[test]
    fn canonical_one_dimensional() {
        let d = canonical_density(1).unwrap();
        assert_eq!(d.band(), 0);
        assert_eq!(
            d.effect(&Interval::full())[(0, 0)],
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn canonical_two_full_interval_is_identity() {
        let d = canonical_density(2).unwrap();
        assert!(
            d.effect(&Interval::full())
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );
    }

    #[test]
    fn canonical_half_interval_matches_quadrature() {
        let d = canonical_density(2).unwrap();
        let e = d.effect(&Interval::new(0.0, PI).unwrap());
        // midpoint quadrature of (1/2π)∫_0^π e^{-iθ} dθ
        let n = 100_000;
        let h = PI / n as f64;
        let quad: Complex64 = (0..n)
            .map(|j| Complex64::from_polar(1.0, -((j as f64 + 0.5) * h)) * (h / TAU))
            .sum();
        assert!((e[(0, 1)] - quad).norm() < 1e-9);
        assert!((e[(0, 1)] - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
        assert!((e[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((e[(1, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_interval_is_zero() {
        let (p, _) = pm_decomposition(3).unwrap();
        assert!(p.effect(&Interval::new(1.0, 1.0).unwrap()).is_zero());
    }

    #[test]
    fn identity_kernel_is_uniform_noise() {
        let d = kernel_density(&CovariantKernel::identity(3).unwrap());
        let x = Interval::new(0.4, 2.1).unwrap();
        let want = ComplexMatrix::identity(3).scale_real(x.length() / TAU);
        assert!(d.effect(&x).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn all_ones_kernel_is_canonical() {
        assert_eq!(
            kernel_density(&CovariantKernel::all_ones(5).unwrap()),
            canonical_density(5).unwrap()
        );
    }

    #[test]
    fn invalid_kernels() {
        let mut k = ComplexMatrix::identity(2);
        k[(0, 1)] = Complex64::new(1.5, 0.0);
        k[(1, 0)] = Complex64::new(1.5, 0.0);
        assert!(matches!(
            CovariantKernel::new(k),
            Err(PovmError::InvalidKernel(_))
        ));
        let k = ComplexMatrix::from_real_diagonal(&[1.0, 0.9]);
        assert!(matches!(
            CovariantKernel::new(k),
            Err(PovmError::InvalidKernel(_))
        ));
    }

    #[test]
    fn pm_one_dimensional_density() {
        let (p, _) = pm_decomposition(1).unwrap();
        for theta in [0.0, 1.0, PI, 4.0] {
            let g = p.evaluate(theta)[(0, 0)];
            assert!((g.re - (1.0 + theta.cos())).abs() < 1e-15);
        }
        assert!((p.effect(&Interval::full())[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pm_mixture_is_canonical_coefficientwise() {
        for l in 1..=8 {
            let (p, m) = pm_decomposition(l).unwrap();
            let mixed = TrigMatrixDensity::mix(0.5, &p, &m).unwrap();
            assert_eq!(mixed, canonical_density(l).unwrap());
        }
    }

    #[test]
    fn mix_edge_weights() {
        let (p, m) = pm_decomposition(3).unwrap();
        assert_eq!(TrigMatrixDensity::mix(1.0, &p, &m).unwrap(), p);
        assert_eq!(TrigMatrixDensity::mix(0.3, &p, &p).unwrap(), p);
        assert!(matches!(
            TrigMatrixDensity::mix(1.2, &p, &m),
            Err(PovmError::BadWeight(_))
        ));
        let c = canonical_density(2).unwrap();
        assert!(matches!(
            TrigMatrixDensity::mix(0.5, &p, &c),
            Err(PovmError::DimMismatch { .. })
        ));
    }

    #[test]
    fn number_state_has_flat_phase() {
        let d = canonical_density(6).unwrap();
        let rho = DensityOperator::from_pure(&number_state(2, 6).unwrap()).unwrap();
        for j in 0..50 {
            let p = d.prob_density(&rho, j as f64 * 0.13).unwrap();
            assert!((p - 1.0 / TAU).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_plus_density() {
        let d = canonical_density(2).unwrap();
        let rho = StateSpec::PhasePlus.density(2).unwrap();
        for j in 0..40 {
            let theta = j as f64 * 0.17;
            // ⟨θ|ϱ|θ⟩/2π evaluated directly on the 2×2 problem
            let v = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)];
            let mut direct = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    direct += v[a].conj() * rho.matrix()[(a, b)] * v[b];
                }
            }
            let p = d.prob_density(&rho, theta).unwrap();
            assert!((p - direct.re / TAU).abs() < 1e-15);
            assert!((p - (1.0 + theta.cos()) / TAU).abs() < 1e-15);
        }
    }

    #[test]
    fn prob_density_dim_mismatch() {
        let d = canonical_density(3).unwrap();
        let rho = StateSpec::Number(0).density(2).unwrap();
        assert!(matches!(
            d.prob_density(&rho, 0.0),
            Err(PovmError::DimMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_format() {
        let (p, _) = pm_decomposition(2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(
            s.starts_with(r#"{"dim":2,"band":2,"coefficients":[[0,0,0,1.0,0.0]"#),
            "{s}"
        );
        let back: TrigMatrixDensity = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let neg = r#"{"dim":1,"band":1,"coefficients":[[-1,0,0,1.0,0.0]]}"#;
        assert!(serde_json::from_str::<TrigMatrixDensity>(neg).is_err());
    }

    #[test]
    fn scalar_profile_detection() {
        let (p, _) = pm_decomposition(4).unwrap();
        let prof = p.scalar_profile().unwrap();
        assert_eq!(prof[&4], Complex64::new(0.5, 0.0));
        let mut c1 = ComplexMatrix::identity(2);
        c1[(0, 1)] = Complex64::new(0.1, 0.0);
        let d = TrigMatrixDensity::from_coefficients(
            2,
            BTreeMap::from([(0, ComplexMatrix::identity(2)), (1, c1)]),
        )
        .unwrap();
        assert!(d.scalar_profile().is_none());
    }
}
