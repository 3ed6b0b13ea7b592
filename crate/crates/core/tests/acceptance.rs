//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use phasepure::extremality::{
    band_limited_purity_scan, corner_forcing, decompose_canonical, discrete_extremality,
    elliptope_extremality, lambda_space, CornerCertificate, CornerMatrix, CornerOutcome,
    RealTrigPoly, Witness,
};
use phasepure::fock::StateSpec;
use phasepure::numerics::ComplexMatrix;
use phasepure::povm::{
    canonical_density, check_covariance, check_normalization, check_positivity, density_on_grid,
    is_pvm, kernel_density, pegg_barnett, periodic_trapezoid, pm_decomposition, sample_outcomes,
    seeded_covariance_pairs, CircularStats, CovariantKernel, DiscretePOVM, Interval,
    TrigMatrixDensity,
};
use phasepure::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "canonical normalization is exact",
            c01_canonical_normalization,
        ),
        ("P± reproduction", c02_pm_reproduction),
        ("cos-integral identity", c03_cos_integral),
        ("Pegg-Barnett purity", c04_pegg_barnett),
        ("non-extremality detection", c05_non_extremality),
        ("corner forcing", c06_corner_forcing),
        ("decomposition characterization", c07_characterization),
        ("band-limited purity trend", c08_purity_trend),
        ("covariant-class extremality", c09_elliptope),
        ("covariance", c10_covariance),
        ("distribution sanity", c11_distributions),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || {
        format!(
            "{what} took {:.3} s (limit {limit_secs} s)",
            elapsed.as_secs_f64()
        )
    })
}

fn c01_canonical_normalization() -> Outcome {
    let start = Instant::now();
    for l in 1..=64 {
        let r = check_normalization(&canonical_density(l).map_err(|e| e.to_string())?);
        ensure(r.passed && r.violation == 0.0, || {
            format!("l={l}: violation {}", r.violation)
        })?;
    }
    let t = start.elapsed();
    within(t, 1.0, "l = 1..64")?;
    Ok(format!(
        "violation 0 for l = 1..64 in {:.3} s",
        t.as_secs_f64()
    ))
}

fn seeded_intervals(seed: u64, count: usize) -> Vec<Interval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..TAU);
            let b: f64 = rng.random_range(0.0..TAU);
            Interval::new(a.min(b), a.max(b)).unwrap()
        })
        .collect()
}

fn c02_pm_reproduction() -> Outcome {
    let start = Instant::now();
    let intervals = seeded_intervals(2, 100);
    let mut worst_mix: f64 = 0.0;
    let mut worst_min: f64 = 0.0;
    for l in 1..=16 {
        let (p, m) = pm_decomposition(l).map_err(|e| e.to_string())?;
        let canonical = canonical_density(l).unwrap();
        for (name, d) in [("P+", &p), ("P-", &m)] {
            let n = check_normalization(d);
            ensure(n.passed && n.violation == 0.0, || {
                format!("l={l} {name}: violation {}", n.violation)
            })?;
            let pos = check_positivity(d, 1024, 1e-10).map_err(|e| e.to_string())?;
            ensure(pos.min_eigenvalue >= -1e-10, || {
                format!("l={l} {name}: min eigenvalue {:e}", pos.min_eigenvalue)
            })?;
            ensure(pos.min_eigenvalue.abs() <= 1e-10, || {
                format!("l={l} {name}: minimum {:e} is not ≈ 0", pos.min_eigenvalue)
            })?;
            worst_min = worst_min.min(pos.min_eigenvalue);
        }
        for x in &intervals {
            let mixed = (&p.effect(x) + &m.effect(x)).scale_real(0.5);
            let r = mixed.max_abs_diff(&canonical.effect(x));
            worst_mix = worst_mix.max(r);
            ensure(r <= 1e-12, || {
                format!("l={l}: mixture residual {r:e} on {x:?}")
            })?;
        }
    }
    let t = start.elapsed();
    within(t, 10.0, "l = 1..16")?;
    Ok(format!(
        "l = 1..16, min eigenvalue {worst_min:e}, mixture residual {worst_mix:e}, {:.3} s",
        t.as_secs_f64()
    ))
}

fn c03_cos_integral() -> Outcome {
    let mut worst: f64 = 0.0;
    for l in 1..=16 {
        let (p, m) = pm_decomposition(l).map_err(|e| e.to_string())?;
        for d in [&p, &m] {
            let r = d
                .effect(&Interval::full())
                .max_abs_diff(&ComplexMatrix::identity(l));
            worst = worst.max(r);
            ensure(r <= 1e-14, || format!("l={l}: ‖E([0,2π)) − I‖ = {r:e}"))?;
        }
    }
    Ok(format!("max deviation {worst:e} for l = 1..16"))
}

fn c04_pegg_barnett() -> Outcome {
    let mut t12 = Duration::ZERO;
    for l in 2..=12 {
        let start = Instant::now();
        let p = pegg_barnett(l).map_err(|e| e.to_string())?;
        ensure(is_pvm(&p, 1e-12), || {
            format!("l={l}: not projective at 1e-12")
        })?;
        let r = discrete_extremality(&p, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.extremal && r.kernel_dim == 0, || {
            format!("l={l}: kernel_dim {}", r.kernel_dim)
        })?;
        if l == 12 {
            t12 = start.elapsed();
        }
    }
    within(t12, 30.0, "l = 12")?;
    Ok(format!(
        "extremal, kernel_dim 0 for l = 2..12; l = 12 in {:.3} s",
        t12.as_secs_f64()
    ))
}

fn c05_non_extremality() -> Outcome {
    let h = ComplexMatrix::identity(2).scale_real(0.5);
    let p = DiscretePOVM::new(vec![h.clone(), h], vec![0.0, PI]).map_err(|e| e.to_string())?;
    let r = discrete_extremality(&p, 1e-9).map_err(|e| e.to_string())?;
    ensure(!r.extremal && r.kernel_dim == 4, || {
        format!("kernel_dim {} (expected 4)", r.kernel_dim)
    })?;
    let Some(Witness::Discrete { plus, minus, step }) = r.witness else {
        return Err("no discrete witness".into());
    };
    for q in [&plus, &minus] {
        DiscretePOVM::new(q.effects().to_vec(), q.labels().to_vec())
            .map_err(|e| format!("witness invalid: {e}"))?;
    }
    let residual = (0..2)
        .map(|i| {
            (&plus.effects()[i] + &minus.effects()[i])
                .scale_real(0.5)
                .max_abs_diff(&p.effects()[i])
        })
        .fold(0.0, f64::max);
    ensure(residual <= 1e-10, || {
        format!("mixture residual {residual:e}")
    })?;
    let spread = plus.effect_distance(&minus);
    ensure(spread > 1e-6, || {
        format!("witness components coincide ({spread:e})")
    })?;
    Ok(format!(
        "kernel_dim 4, step {step:.3e}, mixture residual {residual:e}"
    ))
}

fn c06_corner_forcing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let s = rng.random_range(2..=16usize);
        let lambda: f64 = rng.random_range(0.0..=2.0);
        match corner_forcing(&ComplexMatrix::ones(s).scale_real(lambda), 1e-10)
            .map_err(|e| e.to_string())?
        {
            CornerOutcome::ScalarMultiple { lambda: got } => {
                worst = worst.max((got - lambda).abs());
                ensure((got - lambda).abs() <= 1e-10, || {
                    format!("instance {i}: s={s} λ={lambda} got {got}")
                })?;
            }
            other => {
                return Err(format!(
                    "instance {i}: s={s} λ={lambda} rejected: {other:?}"
                ))
            }
        }
    }
    let g1 = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
    match corner_forcing(&g1, 1e-10).map_err(|e| e.to_string())? {
        CornerOutcome::NotScalarMultiple {
            certificate:
                CornerCertificate::NegativeEigenvalue {
                    matrix: CornerMatrix::Complement,
                    eigenvalue,
                },
        } if (eigenvalue - (1.0 - 5f64.sqrt())).abs() < 1e-12 => Ok(format!(
            "200 instances within {worst:e}; diag(2,0) rejected with eigenvalue {eigenvalue:.12}"
        )),
        other => Err(format!("diag(2,0) not rejected as expected: {other:?}")),
    }
}

/// Rank by Gaussian elimination with partial pivoting.
fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r = 0;
    for c in 0..cols {
        let Some(p) =
            (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))
        else {
            break;
        };
        if rows[p][c].abs() <= tol * scale.max(1.0) {
            continue;
        }
        rows.swap(r, p);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot = &top[r];
        for row in rest {
            let f = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * p;
            }
        }
        r += 1;
    }
    r
}

/// Real dimension of `{f real, band ≤ B : f̂_q = 0 for |q| < l}` from the
/// parametrization `a_0 + Σ a_k cos kθ + b_k sin kθ` and DFT moments.
fn brute_force_lambda_dim(l: usize, band: usize) -> usize {
    let n = 2 * (band + l) + 8;
    let params = 2 * band + 1;
    let basis = |p: usize, theta: f64| -> f64 {
        if p == 0 {
            1.0
        } else if p <= band {
            (p as f64 * theta).cos()
        } else {
            ((p - band) as f64 * theta).sin()
        }
    };
    let mut rows = Vec::new();
    for q in 0..l {
        let mut re = vec![0.0; params];
        let mut im = vec![0.0; params];
        for (p, (re, im)) in re.iter_mut().zip(im.iter_mut()).enumerate() {
            for j in 0..n {
                let theta = TAU * j as f64 / n as f64;
                let w = basis(p, theta) / n as f64;
                *re += w * (q as f64 * theta).cos();
                *im -= w * (q as f64 * theta).sin();
            }
        }
        rows.push(re);
        rows.push(im);
    }
    params - rank(rows, 1e-9)
}

fn c07_characterization() -> Outcome {
    for l in 1..=12 {
        for band in 0..=16 {
            let got = lambda_space(l, band).map_err(|e| e.to_string())?.real_dim;
            let formula = 2 * (band + 1).saturating_sub(l);
            let oracle = brute_force_lambda_dim(l, band);
            ensure(got == formula && got == oracle, || {
                format!("l={l} B={band}: real_dim {got}, formula {formula}, brute force {oracle}")
            })?;
        }
    }
    for l in 1..=16usize {
        let (dp, dm) =
            decompose_canonical(l, &RealTrigPoly::cos(l as u32), 1.0).map_err(|e| e.to_string())?;
        let (p, m) = pm_decomposition(l).unwrap();
        ensure(dp == p && dm == m, || {
            format!("l={l}: cos(lθ) direction differs from P±")
        })?;
        for k in 0..=l as i64 {
            ensure(
                dp.coefficient(k) == p.coefficient(k) && dm.coefficient(-k) == m.coefficient(-k),
                || format!("l={l}: coefficient {k} differs"),
            )?;
        }
    }
    Ok("real_dim matches 2·max(0, B−l+1) and brute-force nullspace for l ≤ 12, B ≤ 16; cos(lθ) reproduces P± for l ≤ 16".into())
}

fn c08_purity_trend() -> Outcome {
    let scan = band_limited_purity_scan(16, 64).map_err(|e| e.to_string())?;
    ensure(scan.survivors.is_empty(), || {
        format!("surviving (l, B, dim): {:?}", scan.survivors)
    })?;
    ensure(scan.note.contains("not a proof"), || {
        "report does not qualify the claim".into()
    })?;
    Ok(format!(
        "{} pairs (B ≤ 16, B < l ≤ 64) all zero; note: {}",
        scan.pairs_checked, scan.note
    ))
}

fn c09_elliptope() -> Outcome {
    let mut t32 = Duration::ZERO;
    for l in 2..=32 {
        let start = Instant::now();
        let ones = elliptope_extremality(&CovariantKernel::all_ones(l).unwrap(), 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(ones.extremal && ones.kernel_dim == 0, || {
            format!("all-ones l={l}: kernel_dim {}", ones.kernel_dim)
        })?;
        let id = elliptope_extremality(&CovariantKernel::identity(l).unwrap(), 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(!id.extremal && id.kernel_dim == l * (l - 1), || {
            format!(
                "identity l={l}: kernel_dim {} (expected {})",
                id.kernel_dim,
                l * (l - 1)
            )
        })?;
        if l == 32 {
            t32 = start.elapsed();
        }
    }
    within(t32, 20.0, "l = 32")?;
    Ok(format!(
        "all-ones extremal, identity kernel_dim l(l−1) for l = 2..32; l = 32 in {:.3} s",
        t32.as_secs_f64()
    ))
}

fn random_kernel(rng: &mut ChaCha8Rng, l: usize) -> CovariantKernel {
    let rank = rng.random_range(1..=l);
    let vecs: Vec<Vec<Complex64>> = (0..l)
        .map(|_| {
            let v: Vec<Complex64> = (0..rank)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / n).collect()
        })
        .collect();
    let mut m = ComplexMatrix::from_fn(l, l, |i, j| {
        vecs[i]
            .iter()
            .zip(&vecs[j])
            .map(|(a, b)| a * b.conj())
            .sum()
    });
    for i in 0..l {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    CovariantKernel::new(m.hermitian_part()).expect("Gram matrix of unit vectors")
}

fn c10_covariance() -> Outcome {
    let pairs = seeded_covariance_pairs(10, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut densities: Vec<(String, TrigMatrixDensity)> = Vec::new();
    for l in 1..=16 {
        densities.push((format!("canonical l={l}"), canonical_density(l).unwrap()));
        densities.push((
            format!("identity l={l}"),
            kernel_density(&CovariantKernel::identity(l).unwrap()),
        ));
        densities.push((
            format!("random kernel l={l}"),
            kernel_density(&random_kernel(&mut rng, l)),
        ));
    }
    let mut worst: f64 = 0.0;
    for (name, d) in &densities {
        let r = check_covariance(d, &pairs, 1e-10);
        worst = worst.max(r.max_residual);
        ensure(r.passed, || {
            format!("{name}: residual {:e}", r.max_residual)
        })?;
    }
    let mut least_pm = f64::INFINITY;
    for l in 2..=8 {
        let (p, _) = pm_decomposition(l).unwrap();
        let r = check_covariance(&p, &pairs, 1e-10);
        least_pm = least_pm.min(r.max_residual);
        ensure(!r.passed, || {
            format!(
                "pm-plus l={l} passed covariance (residual {:e})",
                r.max_residual
            )
        })?;
    }
    Ok(format!(
        "{} covariant densities within {worst:e}; pm-plus residual ≥ {least_pm:.3e} for l = 2..8",
        densities.len()
    ))
}

fn c11_distributions() -> Outcome {
    let mut flat_dev: f64 = 0.0;
    for l in [1, 4, 16, 32] {
        let d = canonical_density(l).unwrap();
        for n in 0..l {
            let rho = StateSpec::Number(n).density(l).unwrap();
            let p = density_on_grid(&d, &rho, 1024, Exec::default()).map_err(|e| e.to_string())?;
            let dev = p.iter().map(|x| (x - 1.0 / TAU).abs()).fold(0.0, f64::max);
            flat_dev = flat_dev.max(dev);
            ensure(dev <= 1e-12, || {
                format!("number:{n} at l={l}: deviation {dev:e}")
            })?;
        }
    }
    let d = canonical_density(32).unwrap();
    let rho = StateSpec::Coherent(Complex64::new(2.0, 0.0))
        .density(32)
        .map_err(|e| e.to_string())?;
    let p = density_on_grid(&d, &rho, 1024, Exec::default()).map_err(|e| e.to_string())?;
    let integral = periodic_trapezoid(&p);
    ensure((integral - 1.0).abs() <= 1e-8, || {
        format!("coherent integral {integral}")
    })?;
    let samples = sample_outcomes(&d, &rho, 100_000, 11, 1024).map_err(|e| e.to_string())?;
    let stats = CircularStats::from_samples(&samples);
    let target = 0.0; // arg z for z = 2
    ensure(
        (stats.mean - target).abs() <= 3.0 * stats.standard_error,
        || {
            format!(
                "circular mean {} vs SE {}",
                stats.mean, stats.standard_error
            )
        },
    )?;
    Ok(format!(
        "number states flat within {flat_dev:e}; coherent integral − 1 = {:e}; mean {:.2e} (3 SE = {:.2e})",
        integral - 1.0,
        stats.mean,
        3.0 * stats.standard_error
    ))
}
