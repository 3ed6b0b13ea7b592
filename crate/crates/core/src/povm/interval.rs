use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PovmError;
use crate::fock::reduce_angle;

/// Half-open outcome interval `[a, b)` with `0 ≤ a ≤ b ≤ 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    start: f64,
    end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self, PovmError> {
        if !(start.is_finite() && end.is_finite()) || start < 0.0 || start > end || end > TAU {
            return Err(PovmError::InvalidInterval { start, end });
        }
        Ok(Self { start, end })
    }

    /// `[0, 2π)`.
    pub fn full() -> Self {
        Self {
            start: 0.0,
            end: TAU,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// The interval rotated by `phi` modulo 2π, split in two when it wraps.
    pub fn shifted(&self, phi: f64) -> Vec<Interval> {
        let len = self.length();
        if len == 0.0 {
            return Vec::new();
        }
        let a = reduce_angle(self.start + phi);
        let b = a + len;
        if b <= TAU {
            vec![Interval { start: a, end: b }]
        } else {
            let mut parts = vec![Interval { start: a, end: TAU }];
            let rest = (b - TAU).min(TAU);
            if rest > 0.0 {
                parts.push(Interval {
                    start: 0.0,
                    end: rest,
                });
            }
            parts
        }
    }

    /// `∫_a^b e^{iqθ} dθ` in closed form.
    ///
    /// Written as `e^{iq(a+b)/2}·2 sin(q(b−a)/2)/q` so that full-period
    /// integrals of non-zero frequencies cancel to rounding level.
    pub fn fourier_integral(&self, q: i64) -> Complex64 {
        let len = self.length();
        if q == 0 {
            return Complex64::new(len, 0.0);
        }
        if len == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let qf = q as f64;
        let mid = 0.5 * (self.start + self.end);
        Complex64::from_polar(2.0 * (0.5 * qf * len).sin() / qf, qf * mid)
    }
}
