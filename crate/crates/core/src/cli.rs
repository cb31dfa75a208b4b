//! Command-line verbs `check`, `flow`, `classify` and `koenigs`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or configuration errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::checks::{all_pass, run_checks, CheckReport, CheckResult};
use crate::config::{ConfigError, RunConfig};
use crate::flow::{conservation_report, integrate, FlowError};
use crate::geometry::{
    classify_manifold, koenigs_correspondence, koenigs_mu, koenigs_phase, koenigs_rho,
    koenigs_s1_scale, DEFAULT_GRID_POINTS, DEFAULT_T_RANGE,
};
use crate::json;
use crate::numerics::{SamplerSpec, Tolerances};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Grid of the Koenigs relation checks.
pub const KOENIGS_T_RANGE: (f64, f64) = (-5.0, 5.0);
pub const KOENIGS_GRID_POINTS: usize = 201;

#[derive(Debug, Parser)]
#[command(name = "si-geodesics", version, about = "Superintegrable geodesic flows: checks, trajectories, classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and write a JSON report.
    Check(CommonArgs),
    /// Integrate a geodesic and write the trajectory as CSV.
    Flow(CommonArgs),
    /// Classify the global geometry and write the report and grid CSV.
    Classify(CommonArgs),
    /// Check the correspondence with the Koenigs form.
    Koenigs(KoenigsArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Args)]
pub struct KoenigsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mass: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = crate::config::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

/// A failure that maps to an exit code and a one-line message.
struct Failure(i32, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))
}

fn load(args: &CommonArgs) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.samples = samples;
    }
    for spec in &args.tol {
        cfg.override_tolerance(spec)?;
    }
    Ok(cfg)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(path, e))
}

/// Writes JSON to `out` when given, otherwise to `stdout`.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = json::to_string(value).map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    match out {
        Some(path) => write_file(path, |w| writeln!(w, "{text}")),
        None => writeln!(stdout, "{text}").map_err(|e| Failure(EXIT_USAGE, e.to_string())),
    }
}

fn cmd_check(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load(args)?;
    let family = cfg.family().map_err(ConfigError::from)?;
    let report = run_checks(&family, cfg.seed, cfg.samples.max(1), &cfg.tolerances()?);
    emit_json(&report, args.out.as_deref(), stdout)?;
    Ok(if all_pass(&report) { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_flow(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load(args)?;
    let family = cfg.family().map_err(ConfigError::from)?;
    let flow = cfg.flow.as_ref().ok_or(ConfigError::MissingBlock("flow"))?;
    let tol = cfg.tolerances()?;
    let (traj, code) = match integrate(&family, flow.initial_point(), flow.span, flow.step) {
        Ok(t) => (t, None),
        Err(e @ (FlowError::StepTooSmall(_) | FlowError::InvalidSpan(_))) => {
            return Err(Failure(EXIT_USAGE, e.to_string()))
        }
        Err(e) => {
            let partial = e.partial().cloned().expect("aborted runs keep their samples");
            (partial, Some(e.to_string()))
        }
    };
    if let Some(path) = &args.out {
        write_file(path, |w| traj.write_csv(w))?;
    }
    let report = conservation_report(&traj);
    emit_json(&report, None, stdout)?;
    match code {
        Some(msg) => Err(Failure(EXIT_FAIL, msg)),
        None if report.max() <= tol.get("drift") => Ok(EXIT_PASS),
        None => Ok(EXIT_FAIL),
    }
}

fn cmd_classify(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load(args)?;
    let family = cfg.family().map_err(ConfigError::from)?;
    let (range, points) = match &cfg.grid {
        Some(g) => ((g.t_min, g.t_max), g.points),
        None => (DEFAULT_T_RANGE, DEFAULT_GRID_POINTS),
    };
    let report = classify_manifold(&family, range, points);
    if let Some(path) = &args.out {
        emit_json(&report, Some(path), stdout)?;
        let csv = path.with_extension("csv");
        write_file(&csv, |w| report.write_grid_csv(w))?;
    }
    writeln!(stdout, "verdict: {:?}", report.verdict).map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    if let Some(k) = report.koenigs_verdict {
        writeln!(stdout, "koenigs verdict: {k:?}").map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    }
    Ok(EXIT_PASS)
}

#[derive(Debug, Serialize)]
pub struct KoenigsReport {
    pub m: f64,
    pub mu: f64,
    pub rho_k: f64,
    pub s1_scale: f64,
    pub grid_points: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: CheckReport,
    /// `max |S₁ᴷ − S₁| / (|S₁| + 1)` without the `1/√m` factor, for reference.
    pub s1_unscaled: f64,
}

/// Residuals of the Koenigs correspondence on the default grid and at
/// `samples` seeded phase points.
pub fn koenigs_report(m: f64, samples: usize, seed: u64, tol: &Tolerances) -> Result<KoenigsReport, crate::geometry::GeometryError> {
    let (t0, t1) = KOENIGS_T_RANGE;
    let n = KOENIGS_GRID_POINTS;
    let (mut res_a, mut res_b) = (0.0f64, 0.0f64);
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        let k = koenigs_correspondence(m, t)?;
        res_a = res_a.max(k.res_a);
        res_b = res_b.max(k.res_b);
    }
    let spec = SamplerSpec::verification(seed);
    let (mut h, mut s1, mut raw) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..samples as u64 {
        let p = spec.sample_phase(i).expect("verification box has no exclusion");
        let k = koenigs_phase(m, &p)?;
        h = h.max(k.h_residual(m));
        s1 = s1.max(k.s1_residual(m));
        raw = raw.max(k.s1_unscaled_residual());
    }
    let t = tol.get("koenigs");
    let checks = [("relation_a", res_a), ("relation_b", res_b), ("h_k", h), ("s1_k", s1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), CheckResult::new(v, t)))
        .collect();
    Ok(KoenigsReport {
        m,
        mu: koenigs_mu(m),
        rho_k: koenigs_rho(m),
        s1_scale: koenigs_s1_scale(m),
        grid_points: n,
        samples,
        seed,
        checks,
        s1_unscaled: raw,
    })
}

fn cmd_koenigs(args: &KoenigsArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let mut tol = Tolerances::default();
    for spec in &args.tol {
        let (name, value) = spec
            .split_once('=')
            .and_then(|(n, v)| Some((n.trim(), v.trim().parse::<f64>().ok()?)))
            .ok_or_else(|| ConfigError::BadOverride(spec.clone()))?;
        if !tol.contains(name) {
            return Err(ConfigError::UnknownTolerance(name.to_string()).into());
        }
        tol.set(name, value);
    }
    let report = koenigs_report(args.mass, args.samples, args.seed, &tol)
        .map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    emit_json(&report, args.out.as_deref(), stdout)?;
    Ok(if all_pass(&report.checks) { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `argv` and runs the chosen verb; returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, stdout),
        Command::Flow(a) => cmd_flow(a, stdout),
        Command::Classify(a) => cmd_classify(a, stdout),
        Command::Koenigs(a) => cmd_koenigs(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
