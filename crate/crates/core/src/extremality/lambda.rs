//! Band-limited decompositions of the truncated canonical phase POVM.
//!
//! Any two-element decomposition of the canonical density has the form
//! `g(θ) = λ(θ)·1_l` and `(2 − λ(θ))·1_l`. Normalization forces the Fourier
//! moments `λ̂_q = δ_{q0}` for `|q| ≤ l − 1`, so `λ = 1 + f` with `f` drawn
//! from the trigonometric polynomials whose spectrum lies in `|k| ≥ l`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExtremalityError;
use crate::numerics::ComplexMatrix;
use crate::povm::TrigMatrixDensity;

/// Real trigonometric polynomial `f(θ) = Σ_k f̂_k e^{ikθ}` with `f̂_{−k} = conj f̂_k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealTrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl RealTrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `cos(kθ)`.
    pub fn cos(k: u32) -> Self {
        let k = k as i64;
        if k == 0 {
            return Self::constant(1.0);
        }
        Self {
            coeffs: BTreeMap::from([
                (k, Complex64::new(0.5, 0.0)),
                (-k, Complex64::new(0.5, 0.0)),
            ]),
        }
    }

    /// `sin(kθ)`; zero for `k = 0`.
    pub fn sin(k: u32) -> Self {
        let k = k as i64;
        if k == 0 {
            return Self::zero();
        }
        Self {
            coeffs: BTreeMap::from([
                (k, Complex64::new(0.0, -0.5)),
                (-k, Complex64::new(0.0, 0.5)),
            ]),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: BTreeMap::from([(0, Complex64::new(c, 0.0))]),
        }
    }

    /// Builds from arbitrary Fourier coefficients; does not enforce realness.
    pub fn from_coefficients(coeffs: BTreeMap<i64, Complex64>) -> Self {
        Self { coeffs }.pruned()
    }

    fn pruned(mut self) -> Self {
        self.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        self
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn band(&self) -> usize {
        self.coeffs
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `f̂_{−k} = conj f̂_k` for every `k`.
    pub fn is_real(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(&k, &c)| self.coefficient(-k) == c.conj())
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| (c * Complex64::from_polar(1.0, k as f64 * theta)).re)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
        .pruned()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            *coeffs.entry(k).or_default() += c;
        }
        Self { coeffs }.pruned()
    }

    /// `max |f(θ_j)|` over `n` uniform grid points.
    pub fn grid_sup_norm(&self, n: usize) -> f64 {
        (0..n)
            .map(|j| self.evaluate(TAU * j as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

// JSON: list of [k, re, im] triples.
impl Serialize for RealTrigPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(i64, f64, f64)> = self.coeffs.iter().map(|(&k, c)| (k, c.re, c.im)).collect();
        v.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealTrigPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v: Vec<(i64, f64, f64)> = Vec::deserialize(deserializer)?;
        Ok(Self::from_coefficients(
            v.into_iter()
                .map(|(k, re, im)| (k, Complex64::new(re, im)))
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaDirection {
    pub kind: TrigKind,
    pub frequency: u32,
    pub poly: RealTrigPoly,
}

/// Perturbation directions `f` admissible in `λ = 1 + f` at truncation `l`
/// and band `B`: real polynomials with `f̂_q = 0` for `|q| ≤ l − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSpace {
    pub l: usize,
    pub band: usize,
    pub real_dim: usize,
    pub basis: Vec<LambdaDirection>,
}

impl LambdaSpace {
    pub fn contains(&self, f: &RealTrigPoly) -> bool {
        f.band() <= self.band && admissible(self.l, f)
    }
}

fn admissible(l: usize, f: &RealTrigPoly) -> bool {
    f.is_real()
        && f.coefficients()
            .keys()
            .all(|k| k.unsigned_abs() as usize >= l)
}

/// `{cos kθ, sin kθ : l ≤ k ≤ B}`, of real dimension `2·max(0, B − l + 1)`.
pub fn lambda_space(l: usize, band: usize) -> Result<LambdaSpace, ExtremalityError> {
    if l == 0 {
        return Err(ExtremalityError::InvalidInput(
            "truncation dimension must be at least 1".into(),
        ));
    }
    let mut basis = Vec::new();
    for k in l..=band {
        let k = k as u32;
        basis.push(LambdaDirection {
            kind: TrigKind::Cos,
            frequency: k,
            poly: RealTrigPoly::cos(k),
        });
        basis.push(LambdaDirection {
            kind: TrigKind::Sin,
            frequency: k,
            poly: RealTrigPoly::sin(k),
        });
    }
    Ok(LambdaSpace {
        l,
        band,
        real_dim: basis.len(),
        basis,
    })
}

/// Slack allowed on the grid sup-norm bound `‖scale·f‖_∞ ≤ 1`.
const SUP_NORM_SLACK: f64 = 1e-12;

/// The pair of densities `(1 ± scale·f(θ))·1_l`, which average to the
/// canonical density. `f` must lie in the λ-space of `l`; the sup-norm bound
/// is checked on `4·(B + 1)` grid points.
pub fn decompose_canonical(
    l: usize,
    f: &RealTrigPoly,
    scale: f64,
) -> Result<(TrigMatrixDensity, TrigMatrixDensity), ExtremalityError> {
    if l == 0 {
        return Err(ExtremalityError::InvalidInput(
            "truncation dimension must be at least 1".into(),
        ));
    }
    if !f.is_real() {
        return Err(ExtremalityError::NotInLambdaSpace(
            "direction is not real-valued".into(),
        ));
    }
    if let Some(k) = f
        .coefficients()
        .keys()
        .find(|k| (k.unsigned_abs() as usize) < l)
    {
        return Err(ExtremalityError::NotInLambdaSpace(format!(
            "Fourier moment {k} must vanish for truncation {l}"
        )));
    }
    if !scale.is_finite() {
        return Err(ExtremalityError::InvalidInput(
            "scale must be finite".into(),
        ));
    }
    let perturbation = f.scaled(scale);
    let grid = 4 * (perturbation.band() + 1);
    let sup = perturbation.grid_sup_norm(grid);
    if sup > 1.0 + SUP_NORM_SLACK {
        return Err(ExtremalityError::SupNormExceeded { sup });
    }

    let ones = ComplexMatrix::ones(l);
    let build = |sign: f64| {
        let mut coeffs = BTreeMap::from([(0usize, ones.clone())]);
        for (&k, &c) in perturbation.coefficients().range(1..) {
            coeffs.insert(k as usize, ones.scale(c * sign));
        }
        TrigMatrixDensity::from_coefficients(l, coeffs)
    };
    Ok((build(1.0)?, build(-1.0)?))
}

/// Outcome of scanning `lambda_space(l, B)` for `l > B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimitedPurityScan {
    pub max_band: usize,
    pub max_dim: usize,
    pub pairs_checked: usize,
    /// `(l, B, real_dim)` with `l > B` and a non-zero λ-space; expected empty.
    pub survivors: Vec<(usize, usize, usize)>,
    pub note: String,
}

/// Checks that no band-limited decomposition of the canonical density
/// survives once the truncation exceeds the band.
pub fn band_limited_purity_scan(
    max_band: usize,
    max_dim: usize,
) -> Result<BandLimitedPurityScan, ExtremalityError> {
    let mut survivors = Vec::new();
    let mut pairs_checked = 0;
    for band in 0..=max_band {
        for l in (band + 1)..=max_dim {
            pairs_checked += 1;
            let space = lambda_space(l, band)?;
            if space.real_dim != 0 {
                survivors.push((l, band, space.real_dim));
            }
        }
    }
    Ok(BandLimitedPurityScan {
        max_band,
        max_dim,
        pairs_checked,
        survivors,
        note: "corroboration at finite truncation, not a proof: for each band B the canonical density \
               admits no band-limited decomposition once l > B"
            .into(),
    })
}
