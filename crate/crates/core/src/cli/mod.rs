//! The `theta-gauss` command-line interface.
//!
//! Every invocation runs one job and writes one JSON document:
//! `{command, inputs_echo, result, diagnostics}` on success, or
//! `{error, field, message}` on failure. Exit codes are 0 (success),
//! 2 (invalid input) and 3 (numerical failure, including a failed `verify`).

pub mod input;
pub mod output;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distribution::{DiscreteGaussian, DEFAULT_EPS};
use crate::error::Error;
use crate::fitting::{
    fit_with, sample_moments, standard_errors, CanonicalPoint, CovarianceEstimator, FitOptions,
    FitReport, MomentData,
};
use crate::geometry::{
    cubic_coefficients, identifiability_probe, kummer_quartic_fit, sample_statistical_points,
    statistical_indices, statistical_map, verify_cubic_with, GEOMETRY_EPS,
};
use crate::sampler::{Sampler, SamplerConfig, ALGORITHM};
use crate::theta::{SiegelMatrix, ThetaPoint, ThetaSums};

use input::{moment_data, parse_json_flag, ParamsFile};
use output::{complex, complex_matrix, complex_vec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

const DEFAULT_COUNT: usize = 1000;
const DEFAULT_KUMMER_POINTS: usize = 60;
const DEFAULT_TRIALS: usize = 200;
const DEFAULT_DEGREE: u32 = 2;
const MAX_DEGREE: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Theta value at (u, B).
    Theta,
    /// Probabilities at the lattice points listed under "points".
    Pmf,
    /// Moments, central moments and cumulants up to order --d.
    Moments,
    /// Entropy of the distribution.
    Entropy,
    /// Fit (u, B) to --mu/--sigma or to a sample under "data".
    Fit,
    /// Draw --count samples with --seed; --tol is the neglected tail mass.
    Sample,
    /// Run the built-in invariant suite.
    Verify,
    /// Degree-d statistical map at (u, B).
    Map,
    /// Genus-one cubic coefficients, with identity residuals when u is given.
    Cubic,
    /// Quartic through --count images of the degree-2 map of a genus-two B.
    Kummer,
    /// Moment identifiability probe with --trials random pairs.
    Probe,
}

#[derive(Debug, Parser)]
#[command(
    name = "theta-gauss",
    version,
    about = "Discrete Gaussian distributions on Z^g parametrized by the Riemann theta function"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON file with g, u, B (and points or data where relevant).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Target mean as a JSON array, e.g. "[0]".
    #[arg(long)]
    pub mu: Option<String>,
    /// Target covariance as a JSON matrix, e.g. "[[1]]".
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Degree of the statistical map, or highest moment order.
    #[arg(long = "d")]
    pub d: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write the JSON document here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failure, reported as `{error, field, message}`.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input {
        error: &'static str,
        field: Option<String>,
        message: String,
    },
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Input {
                error: e.name(),
                field: None,
                message: e.to_string(),
            }
        } else {
            CliError::Numerical(e)
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Input {
                error,
                field,
                message,
            } => {
                json!({ "error": error, "field": field, "message": message })
            }
            CliError::Numerical(e) => {
                json!({ "error": e.name(), "field": Value::Null, "message": e.to_string() })
            }
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Input {
        error: "InvalidInput",
        field: Some(field.to_string()),
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
pub enum FitTarget {
    Moments(MomentData),
    Sample(Vec<Vec<i64>>),
}

/// A validated job: every field its command needs is present and checked.
#[derive(Debug, Clone)]
pub enum Job {
    Theta(ThetaPoint),
    Pmf(ThetaPoint, Vec<Vec<i64>>),
    Moments(ThetaPoint, u32),
    Entropy(ThetaPoint),
    Fit(FitTarget),
    Sample(CanonicalPoint, usize),
    Verify,
    Map(ThetaPoint, u32),
    Cubic(Complex64, Option<Complex64>),
    Kummer(SiegelMatrix, usize),
    Probe(SiegelMatrix, usize),
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: Command,
    pub job: Job,
    pub seed: u64,
    pub tol: f64,
    pub output: Option<PathBuf>,
    echo: Value,
}

fn scalar_of(b: &SiegelMatrix, field: &str) -> Result<Complex64, CliError> {
    if b.dim() != 1 {
        return Err(invalid(
            field,
            format!("this command needs g = 1, got g = {}", b.dim()),
        ));
    }
    Ok(b.get(0, 0))
}

fn positive(value: Option<usize>, default: usize, field: &str) -> Result<usize, CliError> {
    let v = value.unwrap_or(default);
    if v == 0 {
        return Err(invalid(field, format!("--{field} must be positive")));
    }
    Ok(v)
}

fn degree(d: Option<u32>) -> Result<u32, CliError> {
    let d = d.unwrap_or(DEFAULT_DEGREE);
    if !(1..=MAX_DEGREE).contains(&d) {
        return Err(invalid(
            "d",
            format!("--d must lie in 1..={MAX_DEGREE}, got {d}"),
        ));
    }
    Ok(d)
}

fn fit_target(args: &Args, params: &ParamsFile) -> Result<FitTarget, CliError> {
    let mu = match &args.mu {
        Some(s) => Some(parse_json_flag::<Vec<f64>>("mu", s)?),
        None => params.mu.clone(),
    };
    let sigma = match &args.sigma {
        Some(s) => Some(parse_json_flag::<Vec<Vec<f64>>>("sigma", s)?),
        None => params.sigma.clone(),
    };
    match (mu, sigma, &params.data) {
        (Some(mu), Some(sigma), _) => Ok(FitTarget::Moments(moment_data(mu, sigma)?)),
        (Some(_), None, _) => Err(invalid("sigma", "sigma is required with mu")),
        (None, Some(_), _) => Err(invalid("mu", "mu is required with sigma")),
        (None, None, Some(data)) => {
            let g = data.first().map_or(0, Vec::len);
            if g == 0 || data.iter().any(|x| x.len() != g) {
                return Err(invalid(
                    "data",
                    "data must be a non-empty list of equal-length integer vectors",
                ));
            }
            Ok(FitTarget::Sample(data.clone()))
        }
        (None, None, None) => Err(invalid(
            "mu",
            "fit needs --mu and --sigma, or data in --params",
        )),
    }
}

/// Turns parsed flags and the parameter file into a validated job.
pub fn parse_config(args: &Args) -> Result<JobConfig, CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(invalid("tol", "--tol must be a positive number"));
    }
    let params = match &args.params {
        Some(path) => ParamsFile::load(path)?,
        None => ParamsFile::default(),
    };
    let job = match args.command {
        Command::Theta => Job::Theta(params.point(true)?),
        Command::Pmf => {
            let p = params.point(true)?;
            let pts = params.points(p.dim())?;
            Job::Pmf(p, pts)
        }
        Command::Moments => Job::Moments(params.point(true)?, degree(args.d)?),
        Command::Entropy => Job::Entropy(params.point(true)?),
        Command::Fit => Job::Fit(fit_target(args, &params)?),
        Command::Sample => {
            let p = params.point(true)?;
            let canonical = CanonicalPoint::from_theta_point(&p).map_err(|e| match e {
                Error::NotReal => invalid("u", "sampling needs real u and B"),
                other => other.into(),
            })?;
            Job::Sample(canonical, positive(args.count, DEFAULT_COUNT, "count")?)
        }
        Command::Verify => Job::Verify,
        Command::Map => Job::Map(params.point(true)?, degree(args.d)?),
        Command::Cubic => {
            let p = params.point(false)?;
            let b = scalar_of(p.b(), "B")?;
            Job::Cubic(b, params.u.as_ref().map(|_| p.u()[0]))
        }
        Command::Kummer => {
            let p = params.point(false)?;
            if p.dim() != 2 {
                return Err(invalid(
                    "B",
                    format!("kummer needs g = 2, got g = {}", p.dim()),
                ));
            }
            Job::Kummer(
                p.b().clone(),
                positive(args.count, DEFAULT_KUMMER_POINTS, "count")?,
            )
        }
        Command::Probe => {
            let p = params.point(false)?;
            if p.dim() > 2 {
                return Err(invalid(
                    "B",
                    format!("probe supports g <= 2, got g = {}", p.dim()),
                ));
            }
            Job::Probe(
                p.b().clone(),
                positive(args.trials, DEFAULT_TRIALS, "trials")?,
            )
        }
    };
    let echo = json!({
        "params_file": args.params.as_ref().map(|p| p.display().to_string()),
        "params": args.params.as_ref().map(|_| serde_json::to_value(&params).expect("params serialise")),
        "mu": args.mu.as_deref().map(|s| serde_json::from_str::<Value>(s).unwrap_or(Value::Null)),
        "sigma": args.sigma.as_deref().map(|s| serde_json::from_str::<Value>(s).unwrap_or(Value::Null)),
        "count": args.count,
        "seed": args.seed,
        "tol": args.tol,
        "d": args.d,
        "trials": args.trials,
    });
    Ok(JobConfig {
        command: args.command,
        job,
        seed: args.seed,
        tol: args.tol,
        output: args.output.clone(),
        echo,
    })
}

/// Result of a job: the JSON document and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: Value,
    pub exit_code: u8,
}

struct Diagnostics {
    eps: Option<f64>,
    radius: Option<f64>,
    iterations: Option<usize>,
}

impl Diagnostics {
    fn eps(eps: f64) -> Self {
        Self {
            eps: Some(eps),
            radius: None,
            iterations: None,
        }
    }

    fn with_radius(mut self, r: f64) -> Self {
        self.radius = Some(r);
        self
    }
}

fn real_matrix(m: &[Vec<f64>]) -> Value {
    json!(m)
}

fn fit_json(report: &FitReport) -> Value {
    json!({
        "u": report.params.u(),
        "B": real_matrix(report.params.b()),
        "iterations": report.iterations,
        "grad_norm": report.grad_norm,
        "newton_decrement": report.newton_decrement,
        "objective": report.objective,
        "converged": report.converged,
    })
}

fn run(cfg: &JobConfig) -> Result<(Value, Diagnostics, bool), CliError> {
    let ok = |v: Value, d: Diagnostics| Ok((v, d, true));
    match &cfg.job {
        Job::Theta(p) => {
            let sums = ThetaSums::compute(p, 0, cfg.tol)?;
            let b = *sums.budget();
            ok(
                json!({
                    "theta": complex(sums.theta()),
                    "log_theta": complex(sums.log_theta()),
                    "conditioning": sums.conditioning(),
                    "tail_bound": b.tail_bound,
                    "shell_count": b.shell_count,
                }),
                Diagnostics::eps(cfg.tol).with_radius(b.radius),
            )
        }
        Job::Pmf(p, pts) => {
            let d = DiscreteGaussian::new(p.clone(), DEFAULT_EPS)?;
            let probs = pts
                .iter()
                .map(|n| d.pmf(n))
                .collect::<Result<Vec<_>, _>>()?;
            ok(
                json!({ "points": pts, "pmf": complex_vec(&probs), "theta": complex(d.theta()) }),
                Diagnostics::eps(DEFAULT_EPS).with_radius(d.budget().radius),
            )
        }
        Job::Moments(p, order) => {
            let d = DiscreteGaussian::new(p.clone(), DEFAULT_EPS)?;
            let t = d.moments(*order)?;
            let mut rows = Vec::new();
            for a in t.indices().iter().filter(|a| a.order() > 0) {
                rows.push(json!({
                    "a": a.as_slice(),
                    "moment": complex(t.moment(a)?),
                    "central": complex(t.central_moment(a)?),
                    "cumulant": complex(t.cumulant(a)?),
                }));
            }
            let mean = t.mean();
            let cov = t.covariance()?;
            ok(
                json!({
                    "max_order": order,
                    "mean": complex_vec(&mean),
                    "covariance": complex_matrix(&cov),
                    "table": rows,
                    "conditioning": t.conditioning(),
                }),
                Diagnostics::eps(DEFAULT_EPS).with_radius(d.budget().radius),
            )
        }
        Job::Entropy(p) => {
            let d = DiscreteGaussian::new(p.clone(), DEFAULT_EPS)?;
            let h = d.entropy()?;
            ok(
                json!({ "entropy": complex(h.value), "branch_ambiguous": h.branch_ambiguous }),
                Diagnostics::eps(DEFAULT_EPS).with_radius(d.budget().radius),
            )
        }
        Job::Fit(target) => {
            let opts = FitOptions::new(cfg.tol);
            let (report, extra) = match target {
                FitTarget::Moments(m) => (
                    fit_with(m, &opts)?,
                    json!({ "mu": m.mu(), "sigma": m.sigma() }),
                ),
                FitTarget::Sample(data) => {
                    let report =
                        fit_with(&sample_moments(data, CovarianceEstimator::Unbiased)?, &opts)?;
                    let se = standard_errors(&report.params, data.len())?;
                    (
                        report,
                        json!({ "sample_size": data.len(), "estimator": "unbiased", "standard_errors": se }),
                    )
                }
            };
            let mut result = fit_json(&report);
            result["target"] = extra;
            let diag = Diagnostics {
                eps: Some(opts.eps),
                radius: None,
                iterations: Some(report.iterations),
            };
            ok(result, diag)
        }
        Job::Sample(p, count) => {
            let sampler = Sampler::new(p, SamplerConfig::new(cfg.tol, cfg.seed)?)?;
            let draws = sampler.draw(*count);
            let radius = (sampler.radius_squared() as f64).sqrt();
            ok(
                json!({
                    "algorithm": ALGORITHM,
                    "seed": cfg.seed,
                    "tail_eps": cfg.tol,
                    "count": count,
                    "support_size": sampler.support_len(),
                    "samples": draws,
                }),
                Diagnostics::eps(cfg.tol).with_radius(radius),
            )
        }
        Job::Verify => {
            let checks = verify::run_all();
            let all = checks.iter().all(verify::Check::passed);
            let list: Vec<Value> = checks.iter().map(verify::Check::to_json).collect();
            Ok((
                json!({ "checks": list, "all_passed": all }),
                Diagnostics {
                    eps: None,
                    radius: None,
                    iterations: None,
                },
                all,
            ))
        }
        Job::Map(p, d) => {
            let img = statistical_map(*d, p)?;
            let indices = statistical_indices(p.dim(), *d);
            ok(
                json!({
                    "d": d,
                    "indices": indices.iter().map(|a| a.as_slice().to_vec()).collect::<Vec<_>>(),
                    "coords": complex_vec(img.coords()),
                    "normalized": complex_vec(&img.normalized()),
                }),
                Diagnostics::eps(GEOMETRY_EPS),
            )
        }
        Job::Cubic(b, u) => {
            let k = cubic_coefficients(*b)?;
            let mut result = json!({
                "a": complex(k.a), "b": complex(k.b), "c": complex(k.c),
                "e1": complex(k.e1), "e2": complex(k.e2), "e3": complex(k.e3),
                "a_nu": complex(k.a_nu()), "b_nu": complex(k.b_nu()), "c_nu": complex(k.c_nu()),
            });
            if let Some(u) = u {
                let r = verify_cubic_with(*u, *b, &k)?;
                result["residuals"] = json!({
                    "r_cubic": r.r_cubic,
                    "r_quartic": r.r_quartic,
                    "r_det": r.r_det,
                    "conditioning": r.conditioning,
                });
            }
            ok(result, Diagnostics::eps(GEOMETRY_EPS))
        }
        Job::Kummer(b, count) => {
            let pts = sample_statistical_points(2, b, *count, cfg.seed)?;
            let f = kummer_quartic_fit(b, &pts)?;
            ok(
                json!({
                    "points": count,
                    "exponents": f.exponents.iter().map(|a| a.as_slice().to_vec()).collect::<Vec<_>>(),
                    "coeffs": complex_vec(&f.coeffs),
                    "singular_values": f.singular_values,
                    "residual": f.residual,
                    "second": f.second,
                }),
                Diagnostics::eps(GEOMETRY_EPS),
            )
        }
        Job::Probe(b, trials) => {
            let r = identifiability_probe(b, *trials, cfg.seed)?;
            ok(
                json!({
                    "g": r.g,
                    "trials": r.trials,
                    "collisions": r.collisions,
                    "min_separation": r.min_separation,
                    "resampled": r.resampled,
                }),
                Diagnostics::eps(GEOMETRY_EPS),
            )
        }
    }
}

/// Runs a validated job.
pub fn execute(cfg: &JobConfig) -> Outcome {
    match run(cfg) {
        Ok((result, diag, passed)) => Outcome {
            document: json!({
                "command": cfg.command,
                "inputs_echo": cfg.echo,
                "result": result,
                "diagnostics": {
                    "eps": diag.eps,
                    "radius": diag.radius,
                    "iterations": diag.iterations,
                },
            }),
            exit_code: if passed { EXIT_OK } else { EXIT_NUMERICAL },
        },
        Err(e) => Outcome {
            document: e.to_json(),
            exit_code: e.exit_code(),
        },
    }
}

/// Parses, validates and runs `args`.
pub fn run_args(args: &Args) -> Outcome {
    match parse_config(args) {
        Ok(cfg) => execute(&cfg),
        Err(e) => Outcome {
            document: e.to_json(),
            exit_code: e.exit_code(),
        },
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Entry point of the `theta-gauss` binary.
pub fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let doc = json!({ "error": "InvalidArguments", "field": Value::Null, "message": e.to_string() });
            let _ = emit(&output::to_string(&doc), None);
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let outcome = run_args(&args);
    let text = output::to_string(&outcome.document);
    if let Err(e) = emit(&text, args.output.as_ref()) {
        eprintln!("theta-gauss: cannot write output: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(outcome.exit_code)
}
