//! Truncated Fock-space states, density operators and phase shifts.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{is_psd, ComplexMatrix, NumericsError, HERMITIAN_TOL, PSD_TOL};

/// Coherent states whose truncation discards more than this weight are rejected.
pub const MAX_TAIL_MASS: f64 = 0.5;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FockError {
    #[error("number state |{n}⟩ is outside the truncated space of dimension {dim}")]
    IndexOutOfRange { n: usize, dim: usize },
    #[error("truncation discards probability {tail_mass:.6} (limit {MAX_TAIL_MASS})")]
    TruncationTooSevere { tail_mass: f64 },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("cannot parse state spec {spec:?}: {reason}")]
    BadStateSpec { spec: String, reason: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Amplitudes on the truncated number basis `|0⟩, …, |l−1⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
    /// Probability weight discarded by the truncation, before renormalization.
    tail_mass: f64,
    normalized: bool,
}

impl FockVector {
    /// Arbitrary amplitudes, kept as given (not renormalized).
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, FockError> {
        if amplitudes.is_empty() {
            return Err(FockError::ZeroDimension);
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(NumericsError::NonFinite.into());
        }
        let normalized =
            (amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-12;
        Ok(Self {
            amplitudes,
            tail_mass: 0.0,
            normalized,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&self, op: &ComplexMatrix) -> FockVector {
        FockVector {
            amplitudes: op.mul_vec(&self.amplitudes),
            tail_mass: self.tail_mass,
            normalized: false,
        }
    }
}

/// `|n⟩` in dimension `l`.
pub fn number_state(n: usize, l: usize) -> Result<FockVector, FockError> {
    if n >= l {
        return Err(FockError::IndexOutOfRange { n, dim: l });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); l];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(FockVector {
        amplitudes,
        tail_mass: 0.0,
        normalized: true,
    })
}

/// Truncated coherent state `|z⟩`, renormalized on the first `l` levels.
///
/// Coefficients follow `c_0 = e^{−|z|²/2}`, `c_{n+1} = c_n·z/√(n+1)`; the
/// discarded tail is summed with the same recurrence beyond `l`.
pub fn coherent_state(z: Complex64, l: usize) -> Result<FockVector, FockError> {
    if l == 0 {
        return Err(FockError::ZeroDimension);
    }
    let mut amplitudes = Vec::with_capacity(l);
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..l {
        amplitudes.push(c);
        c = c * z / ((n + 1) as f64).sqrt();
    }
    let kept: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();

    // Poisson tail; terms decrease once n exceeds |z|²
    let mean = z.norm_sqr();
    let mut tail = 0.0;
    let mut n = l;
    loop {
        let term = c.norm_sqr();
        tail += term;
        if term == 0.0 || (n as f64 > mean && term <= tail * 1e-18) || n > l + 100_000 {
            break;
        }
        c = c * z / ((n + 1) as f64).sqrt();
        n += 1;
    }

    if kept == 0.0 || tail > MAX_TAIL_MASS {
        return Err(FockError::TruncationTooSevere {
            tail_mass: if kept == 0.0 { 1.0 } else { tail },
        });
    }
    let scale = 1.0 / kept.sqrt();
    amplitudes.iter_mut().for_each(|a| *a *= scale);
    Ok(FockVector {
        amplitudes,
        tail_mass: tail,
        normalized: true,
    })
}

/// Truncated, unnormalized phase vector `|θ⟩ = Σ e^{inθ}|n⟩`; `⟨θ|θ⟩ = l`.
pub fn phase_vector(theta: f64, l: usize) -> FockVector {
    let theta = reduce_angle(theta);
    FockVector {
        amplitudes: (0..l)
            .map(|n| Complex64::from_polar(1.0, n as f64 * theta))
            .collect(),
        tail_mass: 0.0,
        normalized: l == 1,
    }
}

/// Diagonal phase shifter `U(φ)|n⟩ = e^{inφ}|n⟩`.
pub fn phase_shift_unitary(phi: f64, l: usize) -> ComplexMatrix {
    let phi = reduce_angle(phi);
    let diag: Vec<Complex64> = (0..l)
        .map(|n| Complex64::from_polar(1.0, n as f64 * phi))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// A validated density operator: Hermitian, PSD and unit trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, FockError> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(FockError::InvalidDensity(
                "must be a non-empty square matrix".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(NumericsError::NonFinite.into());
        }
        if matrix.hermiticity_residual() > HERMITIAN_TOL {
            return Err(FockError::InvalidDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(FockError::InvalidDensity(format!("trace {tr} ≠ 1")));
        }
        let (psd, min) = is_psd(&matrix, PSD_TOL)?;
        if !psd {
            return Err(FockError::InvalidDensity(format!(
                "minimum eigenvalue {min:e} < 0"
            )));
        }
        Ok(Self { matrix })
    }

    /// `v v† / ‖v‖²`.
    pub fn from_pure(v: &FockVector) -> Result<Self, FockError> {
        let n2 = v.norm_sqr();
        if v.dim() == 0 {
            return Err(FockError::ZeroDimension);
        }
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(FockError::InvalidDensity(
                "zero or non-finite state vector".into(),
            ));
        }
        let m = ComplexMatrix::outer(v.amplitudes(), v.amplitudes()).scale_real(1.0 / n2);
        Self::new(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `U ϱ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self, FockError> {
        Self::new(self.matrix.conjugate_by(u).hermitian_part())
    }
}

/// State mini-grammar: `number:n`, `coherent:a+bi`, `phase:theta`, `phase-plus`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Number(usize),
    Coherent(Complex64),
    /// Normalized truncated phase state at angle θ.
    Phase(f64),
    /// `(|0⟩ + |1⟩)/√2`.
    PhasePlus,
}

impl StateSpec {
    pub fn vector(&self, l: usize) -> Result<FockVector, FockError> {
        match *self {
            StateSpec::Number(n) => number_state(n, l),
            StateSpec::Coherent(z) => coherent_state(z, l),
            StateSpec::Phase(theta) => {
                if l == 0 {
                    return Err(FockError::ZeroDimension);
                }
                let v = phase_vector(theta, l);
                let s = 1.0 / (l as f64).sqrt();
                Ok(FockVector {
                    amplitudes: v.amplitudes.iter().map(|a| a * s).collect(),
                    tail_mass: 0.0,
                    normalized: true,
                })
            }
            StateSpec::PhasePlus => {
                if l < 2 {
                    return Err(FockError::IndexOutOfRange { n: 1, dim: l });
                }
                let mut amplitudes = vec![Complex64::new(0.0, 0.0); l];
                amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                amplitudes[1] = amplitudes[0];
                Ok(FockVector {
                    amplitudes,
                    tail_mass: 0.0,
                    normalized: true,
                })
            }
        }
    }

    pub fn density(&self, l: usize) -> Result<DensityOperator, FockError> {
        DensityOperator::from_pure(&self.vector(l)?)
    }
}

impl FromStr for StateSpec {
    type Err = FockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| FockError::BadStateSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let s_trim = s.trim();
        if s_trim == "phase-plus" {
            return Ok(StateSpec::PhasePlus);
        }
        let (kind, arg) = s_trim
            .split_once(':')
            .ok_or_else(|| bad("expected kind:value"))?;
        match kind {
            "number" => arg
                .trim()
                .parse::<usize>()
                .map(StateSpec::Number)
                .map_err(|_| bad("number index must be a non-negative integer")),
            "coherent" => {
                let z = arg
                    .trim()
                    .parse::<Complex64>()
                    .map_err(|_| bad("amplitude must look like a+bi"))?;
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(bad("amplitude must be finite"));
                }
                Ok(StateSpec::Coherent(z))
            }
            "phase" => {
                let theta = arg
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("angle must be a decimal number of radians"))?;
                if !theta.is_finite() {
                    return Err(bad("angle must be finite"));
                }
                Ok(StateSpec::Phase(theta))
            }
            _ => Err(bad(
                "unknown state kind (number, coherent, phase, phase-plus)",
            )),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Number(n) => write!(f, "number:{n}"),
            StateSpec::Coherent(z) => write!(f, "coherent:{z}"),
            StateSpec::Phase(t) => write!(f, "phase:{t}"),
            StateSpec::PhasePlus => write!(f, "phase-plus"),
        }
    }
}
