use std::path::Path;
use std::str::FromStr;

use serde_json::json;

use super::output::{json_report, num, to_value, Csv};
use super::{CliError, OutFormat, RunConfig, EXIT_OK, EXIT_VERDICT};
use crate::exec::Exec;
use crate::extremality::{
    decompose_canonical, discrete_extremality, elliptope_extremality, lambda_space,
    ExtremalityReport, RealTrigPoly,
};
use crate::fock::StateSpec;
use crate::numerics::{is_psd, ComplexMatrix};
use crate::povm::{
    bin_to_discrete, canonical_density, check_covariance, check_discrete_covariance,
    check_normalization, check_positivity_with, density_on_grid, is_pvm, kernel_density,
    pegg_barnett, periodic_trapezoid, pm_decomposition, sample_outcomes_with,
    seeded_covariance_pairs, CircularStats, CovariantKernel, DiscretePOVM, PovmError,
    TrigMatrixDensity, SUM_TOL,
};

const COVARIANCE_PAIRS: usize = 16;
const PVM_TOL: f64 = 1e-12;

pub enum PovmSource {
    Density {
        density: TrigMatrixDensity,
        kernel: Option<CovariantKernel>,
    },
    Discrete(DiscretePOVM),
}

impl PovmSource {
    pub fn resolve(spec: &str, dim: Option<usize>) -> Result<Self, CliError> {
        let need_dim =
            || dim.ok_or_else(|| CliError::Usage(format!("--dim is required for --povm {spec}")));
        let from_kernel = |k: CovariantKernel| PovmSource::Density {
            density: kernel_density(&k),
            kernel: Some(k),
        };
        match spec {
            "canonical" => {
                let l = need_dim()?;
                Ok(PovmSource::Density {
                    density: canonical_density(l)?,
                    kernel: Some(CovariantKernel::all_ones(l)?),
                })
            }
            "pegg-barnett" => Ok(PovmSource::Discrete(pegg_barnett(need_dim()?)?)),
            "pm-plus" | "pm-minus" => {
                let (p, m) = pm_decomposition(need_dim()?)?;
                let density = if spec == "pm-plus" { p } else { m };
                Ok(PovmSource::Density { density, kernel: None })
            }
            "kernel:identity" => Ok(from_kernel(CovariantKernel::identity(need_dim()?)?)),
            "kernel:all-ones" => Ok(from_kernel(CovariantKernel::all_ones(need_dim()?)?)),
            _ => match spec.strip_prefix("kernel:") {
                Some(path) => {
                    let k = load_kernel(Path::new(path))?;
                    if let Some(d) = dim {
                        if d != k.dim() {
                            return Err(CliError::Usage(format!(
                                "--dim {d} does not match the {}-dimensional kernel in {path}",
                                k.dim()
                            )));
                        }
                    }
                    Ok(from_kernel(k))
                }
                None => Err(CliError::Usage(format!(
                    "unknown --povm {spec:?}; expected canonical, pegg-barnett, pm-plus, pm-minus or kernel:..."
                ))),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PovmSource::Density { density, .. } => density.dim(),
            PovmSource::Discrete(p) => p.dim(),
        }
    }

    pub fn band(&self) -> usize {
        match self {
            PovmSource::Density { density, .. } => density.band(),
            PovmSource::Discrete(_) => 0,
        }
    }

    /// Applies `--bins` to densities; discrete POVMs pass through.
    fn binned(self, bins: Option<usize>) -> Result<Self, CliError> {
        match (self, bins) {
            (PovmSource::Density { density, .. }, Some(m)) => {
                Ok(PovmSource::Discrete(bin_to_discrete(&density, m)?))
            }
            (other, _) => Ok(other),
        }
    }
}

fn load_kernel(path: &Path) -> Result<CovariantKernel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read kernel file {}: {e}", path.display())))?;
    let matrix: ComplexMatrix = serde_json::from_str(&text).map_err(|e| {
        CliError::Povm(PovmError::InvalidKernel(format!("{}: {e}", path.display())))
    })?;
    Ok(CovariantKernel::new(matrix)?)
}

pub fn dist(cfg: &RunConfig, povm: PovmSource) -> Result<(i32, String), CliError> {
    let state = StateSpec::from_str(&cfg.state_spec)?;
    let vector = state.vector(cfg.dim)?;
    let rho = crate::fock::DensityOperator::from_pure(&vector)?;
    let body = match povm.binned(cfg.bins)? {
        PovmSource::Density { density, .. } => {
            let values = density_on_grid(&density, &rho, cfg.grid, Exec::default())?;
            let integral = periodic_trapezoid(&values);
            let thetas = crate::povm::grid_angles(cfg.grid);
            match cfg.out_format {
                OutFormat::Json => json_report(
                    cfg,
                    vec![
                        ("theta", to_value(&thetas)),
                        ("p", to_value(&values)),
                        ("integral", json!(integral)),
                        ("tail_mass", json!(vector.tail_mass())),
                    ],
                ),
                OutFormat::Csv => {
                    let mut csv = Csv::new(cfg);
                    csv.header(&["theta", "p"]);
                    for (t, p) in thetas.iter().zip(&values) {
                        csv.row(&[num(*t), num(*p)]);
                    }
                    csv.meta("tail_mass", &num(vector.tail_mass()));
                    csv.meta("integral", &num(integral));
                    csv.finish()
                }
            }
        }
        PovmSource::Discrete(p) => {
            let probs = p.probabilities(&rho)?;
            let total: f64 = probs.iter().sum();
            match cfg.out_format {
                OutFormat::Json => json_report(
                    cfg,
                    vec![
                        ("label", to_value(&p.labels())),
                        ("probability", to_value(&probs)),
                        ("total", json!(total)),
                        ("tail_mass", json!(vector.tail_mass())),
                    ],
                ),
                OutFormat::Csv => {
                    let mut csv = Csv::new(cfg);
                    csv.header(&["label", "probability"]);
                    for (t, q) in p.labels().iter().zip(&probs) {
                        csv.row(&[num(*t), num(*q)]);
                    }
                    csv.meta("tail_mass", &num(vector.tail_mass()));
                    csv.meta("total", &num(total));
                    csv.finish()
                }
            }
        }
    };
    Ok((EXIT_OK, body))
}

pub fn check(cfg: &RunConfig, povm: PovmSource) -> Result<(i32, String), CliError> {
    let (passed, fields) = match povm.binned(cfg.bins)? {
        PovmSource::Density { density, .. } => {
            let normalization = check_normalization(&density);
            let positivity = check_positivity_with(&density, cfg.grid, cfg.tol, Exec::default())?;
            let pairs = seeded_covariance_pairs(cfg.seed, COVARIANCE_PAIRS);
            let covariance = check_covariance(&density, &pairs, cfg.tol);
            let passed = normalization.passed && positivity.passed && covariance.passed;
            (
                passed,
                vec![
                    ("kind", json!("density")),
                    ("normalization", to_value(&normalization)),
                    ("positivity", to_value(&positivity)),
                    ("covariance", to_value(&covariance)),
                ],
            )
        }
        PovmSource::Discrete(p) => {
            let residual = p.normalization_residual();
            let mut min_eig = f64::INFINITY;
            for a in p.effects() {
                min_eig = min_eig.min(is_psd(a, cfg.tol)?.1);
            }
            let covariance = check_discrete_covariance(&p, cfg.tol);
            let normalization = json!({ "passed": residual <= SUM_TOL, "violation": residual, "tolerance": SUM_TOL });
            let positivity = json!({ "passed": min_eig >= -cfg.tol, "min_eigenvalue": min_eig, "tolerance": cfg.tol });
            let passed = residual <= SUM_TOL && min_eig >= -cfg.tol && covariance.passed;
            (
                passed,
                vec![
                    ("kind", json!("discrete")),
                    ("normalization", normalization),
                    ("positivity", positivity),
                    ("covariance", to_value(&covariance)),
                    ("projective", json!(is_pvm(&p, PVM_TOL))),
                ],
            )
        }
    };
    let code = if passed { EXIT_OK } else { EXIT_VERDICT };
    Ok((code, verdict_body(cfg, passed, fields)))
}

fn verdict_body(
    cfg: &RunConfig,
    passed: bool,
    mut fields: Vec<(&str, serde_json::Value)>,
) -> String {
    fields.push(("passed", json!(passed)));
    match cfg.out_format {
        OutFormat::Json => json_report(cfg, fields),
        OutFormat::Csv => {
            let mut csv = Csv::new(cfg);
            csv.header(&["check", "passed", "value"]);
            for (name, v) in &fields {
                let (ok, value) = match v {
                    serde_json::Value::Object(o) => (
                        o.get("passed").map(|p| p.to_string()).unwrap_or_default(),
                        [
                            "violation",
                            "min_eigenvalue",
                            "max_residual",
                            "kernel_dim",
                            "real_dim",
                        ]
                        .iter()
                        .find_map(|k| o.get(*k))
                        .map(csv_value)
                        .unwrap_or_default(),
                    ),
                    other => (String::new(), csv_value(other)),
                };
                csv.row(&[name.to_string(), ok, value]);
            }
            csv.finish()
        }
    }
}

fn csv_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn extremal(cfg: &RunConfig, povm: PovmSource) -> Result<(i32, String), CliError> {
    let (test, report): (&str, ExtremalityReport) = match povm.binned(cfg.bins)? {
        PovmSource::Discrete(p) => ("discrete", discrete_extremality(&p, cfg.tol)?),
        PovmSource::Density {
            kernel: Some(k), ..
        } => ("elliptope", elliptope_extremality(&k, cfg.tol)?),
        PovmSource::Density { kernel: None, .. } => {
            return Err(CliError::Usage(format!(
                "--povm {} is not covariant; pass --bins to test a binned version",
                cfg.povm_spec
            )))
        }
    };
    let code = if report.extremal {
        EXIT_OK
    } else {
        EXIT_VERDICT
    };
    let body = match cfg.out_format {
        OutFormat::Json => json_report(
            cfg,
            vec![("test", json!(test)), ("report", to_value(&report))],
        ),
        OutFormat::Csv => {
            let mut csv = Csv::new(cfg);
            csv.header(&["field", "value"]);
            csv.row(&["test".into(), test.into()]);
            csv.row(&["extremal".into(), report.extremal.to_string()]);
            csv.row(&["kernel_dim".into(), report.kernel_dim.to_string()]);
            csv.row(&["tolerance_used".into(), num(report.tolerance_used)]);
            csv.row(&[
                "domain_dim".into(),
                report.diagnostics.domain_dim.to_string(),
            ]);
            csv.row(&["witness".into(), report.witness.is_some().to_string()]);
            csv.finish()
        }
    };
    Ok((code, body))
}

pub fn decompose(cfg: &RunConfig) -> Result<(i32, String), CliError> {
    let (l, band) = (cfg.dim, cfg.band);
    let space = lambda_space(l, band)?;
    let note = if space.real_dim == 0 {
        format!("no band-limited decomposition of the canonical POVM at l = {l}, band {band}")
    } else {
        format!(
            "decompositions λ = 1 + f with f in the {}-dimensional span below and sup |f| ≤ 1",
            space.real_dim
        )
    };
    let mut passed = true;
    let mut fields = vec![("lambda_space", to_value(&space)), ("note", json!(note))];
    if band >= l {
        let (plus, minus) = pm_decomposition(l)?;
        let canonical = canonical_density(l)?;
        let mixture_residual =
            TrigMatrixDensity::mix(0.5, &plus, &minus)?.coefficient_distance(&canonical);
        let (dp, dm) = decompose_canonical(l, &RealTrigPoly::cos(l as u32), 1.0)?;
        let reproduces = dp == plus && dm == minus;
        let np = check_normalization(&plus);
        let nm = check_normalization(&minus);
        let pp = check_positivity_with(&plus, cfg.grid, cfg.tol, Exec::default())?;
        let pmn = check_positivity_with(&minus, cfg.grid, cfg.tol, Exec::default())?;
        passed = np.passed
            && nm.passed
            && pp.passed
            && pmn.passed
            && mixture_residual <= cfg.tol
            && reproduces;
        fields.push((
            "pm_verification",
            json!({
                "normalization_plus": to_value(&np),
                "normalization_minus": to_value(&nm),
                "positivity_plus": to_value(&pp),
                "positivity_minus": to_value(&pmn),
                "mixture_residual": mixture_residual,
                "cos_direction_reproduces_pm": reproduces,
                "passed": passed,
            }),
        ));
    }
    let code = if passed { EXIT_OK } else { EXIT_VERDICT };
    let body = match cfg.out_format {
        OutFormat::Json => json_report(cfg, fields),
        OutFormat::Csv => {
            let mut csv = Csv::new(cfg);
            csv.meta("real_dim", &space.real_dim.to_string());
            csv.meta("note", &note);
            csv.header(&["kind", "frequency"]);
            for d in &space.basis {
                let kind = serde_json::to_value(d.kind).expect("kind serializes");
                csv.row(&[csv_value(&kind), d.frequency.to_string()]);
            }
            if band >= l {
                csv.meta("pm_verification_passed", &passed.to_string());
            }
            csv.finish()
        }
    };
    Ok((code, body))
}

pub fn sample(cfg: &RunConfig, povm: PovmSource) -> Result<(i32, String), CliError> {
    let density = match povm {
        PovmSource::Density { density, .. } if cfg.bins.is_none() => density,
        _ => {
            return Err(CliError::Usage(
                "sample needs a continuous --povm without --bins".into(),
            ))
        }
    };
    let rho = StateSpec::from_str(&cfg.state_spec)?.density(cfg.dim)?;
    let samples = sample_outcomes_with(&density, &rho, cfg.n, cfg.seed, cfg.grid, Exec::default())?;
    let stats = CircularStats::from_samples(&samples);
    let body = match cfg.out_format {
        OutFormat::Json => json_report(
            cfg,
            vec![("samples", to_value(&samples)), ("stats", to_value(&stats))],
        ),
        OutFormat::Csv => {
            let mut csv = Csv::new(cfg);
            csv.header(&["theta"]);
            for s in &samples {
                csv.row(&[num(*s)]);
            }
            csv.meta("seed", &cfg.seed.to_string());
            csv.meta("grid", &cfg.grid.to_string());
            csv.meta("circular_mean", &num(stats.mean));
            csv.meta("standard_error", &num(stats.standard_error));
            csv.finish()
        }
    };
    Ok((EXIT_OK, body))
}
