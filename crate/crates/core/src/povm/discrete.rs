use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{check_weight, mix_matrices};
use super::{Interval, PovmError, TrigMatrixDensity};
use crate::fock::{phase_vector, DensityOperator};
use crate::numerics::{is_psd, ComplexMatrix, HERMITIAN_TOL, PSD_TOL};

/// Entrywise tolerance on `Σ effects = I`.
pub const SUM_TOL: f64 = 1e-10;

/// Finite-outcome POVM with real outcome labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePOVM {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    labels: Vec<f64>,
}

impl DiscretePOVM {
    /// Validates Hermiticity, positivity (tol 1e−10) and `Σ A_i = I` (1e−10 per entry).
    pub fn new(effects: Vec<ComplexMatrix>, labels: Vec<f64>) -> Result<Self, PovmError> {
        let invalid = |msg: String| Err(PovmError::InvalidPovm(msg));
        if effects.is_empty() {
            return invalid("no effects".into());
        }
        if labels.len() != effects.len() {
            return invalid(format!(
                "{} labels for {} effects",
                labels.len(),
                effects.len()
            ));
        }
        let dim = effects[0].rows();
        if dim == 0 {
            return invalid("zero-dimensional effects".into());
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut cleaned = Vec::with_capacity(effects.len());
        for (i, a) in effects.into_iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return invalid(format!(
                    "effect {i} has shape {}×{}, expected {dim}×{dim}",
                    a.rows(),
                    a.cols()
                ));
            }
            if !a.is_finite() {
                return invalid(format!("effect {i} has non-finite entries"));
            }
            if a.hermiticity_residual() > HERMITIAN_TOL * a.frobenius_norm().max(1.0) {
                return invalid(format!("effect {i} is not Hermitian"));
            }
            let a = a.hermitian_part();
            let (psd, min) = is_psd(&a, PSD_TOL)?;
            if !psd {
                return invalid(format!("effect {i} has negative eigenvalue {min:e}"));
            }
            sum = &sum + &a;
            cleaned.push(a);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > SUM_TOL {
            return invalid(format!("effects sum to identity only within {dev:e}"));
        }
        Ok(Self {
            dim,
            effects: cleaned,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// `tr[ϱ A_i]` for each outcome.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>, PovmError> {
        if rho.dim() != self.dim {
            return Err(PovmError::DimMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(self
            .effects
            .iter()
            .map(|a| rho.matrix().matmul(a).trace().re)
            .collect())
    }

    /// Largest entrywise deviation of `Σ A_i` from `I`.
    pub fn normalization_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.effects {
            sum = &sum + a;
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Effect-wise `t·a + (1−t)·b`; outcome labels must agree.
    pub fn mix(t: f64, a: &Self, b: &Self) -> Result<Self, PovmError> {
        check_weight(t)?;
        if a.dim != b.dim {
            return Err(PovmError::DimMismatch {
                expected: a.dim,
                found: b.dim,
            });
        }
        if a.labels != b.labels {
            return Err(PovmError::OutcomeMismatch);
        }
        let effects = a
            .effects
            .iter()
            .zip(&b.effects)
            .map(|(x, y)| mix_matrices(t, x, y))
            .collect();
        Self::new(effects, a.labels.clone())
    }

    /// Largest Frobenius distance between corresponding effects.
    pub fn effect_distance(&self, other: &Self) -> f64 {
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.frobenius_distance(b))
            .fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for DiscretePOVM {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            effects: Vec<ComplexMatrix>,
            labels: Vec<f64>,
        }
        let r = Repr::deserialize(deserializer)?;
        DiscretePOVM::new(r.effects, r.labels).map_err(serde::de::Error::custom)
    }
}

/// Pegg–Barnett measurement: projections onto `phase_vector(2πj/l)/√l`.
pub fn pegg_barnett(l: usize) -> Result<DiscretePOVM, PovmError> {
    if l == 0 {
        return Err(PovmError::ZeroDimension);
    }
    let mut effects = Vec::with_capacity(l);
    let mut labels = Vec::with_capacity(l);
    let s = 1.0 / (l as f64).sqrt();
    for j in 0..l {
        let theta = TAU * j as f64 / l as f64;
        let v: Vec<Complex64> = phase_vector(theta, l)
            .amplitudes()
            .iter()
            .map(|a| a * s)
            .collect();
        effects.push(ComplexMatrix::outer(&v, &v).hermitian_part());
        labels.push(theta);
    }
    DiscretePOVM::new(effects, labels)
}

/// `‖A_i² − A_i‖_F ≤ tol` for every effect.
pub fn is_pvm(p: &DiscretePOVM, tol: f64) -> bool {
    p.effects
        .iter()
        .all(|a| a.matmul(a).frobenius_distance(a) <= tol)
}

/// `m` equal bins `[2πj/m, 2π(j+1)/m)` labelled by their centres.
pub fn bin_to_discrete(d: &TrigMatrixDensity, m: usize) -> Result<DiscretePOVM, PovmError> {
    if m == 0 {
        return Err(PovmError::InvalidPovm("need at least one bin".into()));
    }
    let edge = |j: usize| {
        if j == m {
            TAU
        } else {
            TAU * j as f64 / m as f64
        }
    };
    let mut effects = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for j in 0..m {
        let x = Interval::new(edge(j), edge(j + 1))?;
        effects.push(d.effect(&x));
        labels.push(0.5 * (x.start() + x.end()));
    }
    DiscretePOVM::new(effects, labels)
}
