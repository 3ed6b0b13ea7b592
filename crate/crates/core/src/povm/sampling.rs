//! Outcome distributions on a grid and inverse-CDF sampling.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::{check_positivity_with, grid_angles, min_grid_points};
use super::{PovmError, TrigMatrixDensity};
use crate::exec::Exec;
use crate::fock::DensityOperator;
use crate::numerics::PSD_TOL;

/// `p(θ_j)` on the uniform grid `θ_j = 2πj/N`.
pub fn density_on_grid(
    d: &TrigMatrixDensity,
    rho: &DensityOperator,
    grid_points: usize,
    exec: Exec,
) -> Result<Vec<f64>, PovmError> {
    d.check_state_dim(rho)?;
    let angles = grid_angles(grid_points);
    Ok(exec.map_slice(&angles, |&theta| d.prob_density_unchecked(rho, theta)))
}

/// Periodic trapezoid rule on uniform grid samples over `[0, 2π)`.
pub fn periodic_trapezoid(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    TAU / values.len() as f64 * values.iter().sum::<f64>()
}

pub fn sample_outcomes(
    d: &TrigMatrixDensity,
    rho: &DensityOperator,
    n: usize,
    seed: u64,
    grid_points: usize,
) -> Result<Vec<f64>, PovmError> {
    sample_outcomes_with(d, rho, n, seed, grid_points, Exec::default())
}

/// Draws `n` outcomes by inverting the trapezoid-integrated CDF on a uniform
/// grid, interpolating linearly between grid nodes.
///
/// The CDF is exact up to `O(1/N²)` for a grid of `N` points. Uniform
/// variates come from ChaCha8 seeded with `seed`, drawn sequentially, so the
/// output depends only on the arguments.
pub fn sample_outcomes_with(
    d: &TrigMatrixDensity,
    rho: &DensityOperator,
    n: usize,
    seed: u64,
    grid_points: usize,
    exec: Exec,
) -> Result<Vec<f64>, PovmError> {
    d.check_state_dim(rho)?;
    let grid_points = grid_points.max(min_grid_points(d.band()));
    let positivity = check_positivity_with(d, grid_points, PSD_TOL, exec)?;
    if !positivity.passed {
        return Err(PovmError::NegativeDensity {
            theta: positivity.worst_theta,
            min_eigenvalue: positivity.min_eigenvalue,
        });
    }

    let mut p = density_on_grid(d, rho, grid_points, exec)?;
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    p.push(p[0]); // θ = 2π closes the period

    let h = TAU / grid_points as f64;
    let mut cdf = Vec::with_capacity(p.len());
    cdf.push(0.0);
    for w in p.windows(2) {
        let last = *cdf.last().unwrap();
        cdf.push(last + 0.5 * (w[0] + w[1]) * h);
    }
    let total = *cdf.last().unwrap();
    if total.is_nan() || total <= 0.0 {
        return Err(PovmError::NegativeDensity {
            theta: 0.0,
            min_eigenvalue: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniforms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok(exec.map_slice(&uniforms, |&u| invert_cdf(&cdf, total * u, h)))
}

fn invert_cdf(cdf: &[f64], target: f64, h: f64) -> f64 {
    // last node with cdf ≤ target
    let j = cdf
        .partition_point(|&c| c <= target)
        .saturating_sub(1)
        .min(cdf.len() - 2);
    let mass = cdf[j + 1] - cdf[j];
    let frac = if mass > 0.0 {
        ((target - cdf[j]) / mass).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let theta = (j as f64 + frac) * h;
    if theta >= TAU {
        0.0
    } else {
        theta
    }
}

/// Circular summary statistics of angular samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularStats {
    /// `arg(mean e^{iθ})` in `(−π, π]`.
    pub mean: f64,
    /// Mean resultant length `|mean e^{iθ}|`.
    pub resultant_length: f64,
    /// Large-sample standard error of the circular mean.
    pub standard_error: f64,
    pub count: usize,
}

impl CircularStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let (s, c) = samples
            .iter()
            .fold((0.0, 0.0), |(s, c), &t| (s + t.sin(), c + t.cos()));
        let (s, c) = (s / n, c / n);
        let mean = s.atan2(c);
        let r = s.hypot(c);
        // δ = (1 − ρ₂)/(2R²) with ρ₂ the second central trigonometric moment
        let rho2 = samples
            .iter()
            .map(|&t| (2.0 * (t - mean)).cos())
            .sum::<f64>()
            / n;
        let dispersion = (1.0 - rho2) / (2.0 * r * r);
        Self {
            mean,
            resultant_length: r,
            standard_error: (dispersion / n).sqrt(),
            count: samples.len(),
        }
    }
}
