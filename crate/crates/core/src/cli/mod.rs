//! Command-line front end: `run`, `sweep`, `bounds` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, parse or
//! validation error, 3 infeasible parameters.

pub mod csv;
pub mod svg;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::bounds::{BoundInputs, BoundReport};
use crate::error::Error;
use crate::sim::{run, sweep, AxisValue, RunConfig, SweepAxis, SweepPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Overrides the default output directory (`out`).
pub const OUT_DIR_ENV: &str = "SIGNSGD_BFT_OUT_DIR";
/// Manifest key ignored when a manifest is read back as a config.
pub const PROVENANCE_KEY: &str = "provenance";
pub const TOOL_NAME: &str = "signsgd-bft";

#[derive(Debug, Parser)]
#[command(name = "signsgd-bft", version, about = "signSGD with majority vote under Byzantine workers")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one training run and write its trajectory.
    Run(RunArgs),
    /// Run a grid of configurations along one axis, optionally split into panels.
    Sweep(SweepArgs),
    /// Print every closed-form bound for one parameter point.
    Bounds(BoundsArgs),
    /// Check the bounds against Monte Carlo estimates.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Re-read the written CSV and validate it against the schema.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// byzantine_count, batch_size or attack.
    #[arg(long)]
    axis: SweepAxis,
    /// Comma-separated axis values; `t` is the iteration-counter batch.
    #[arg(long)]
    values: String,
    /// Second axis; one chart panel and one subdirectory per value.
    #[arg(long, requires = "panel_values")]
    panel_axis: Option<SweepAxis>,
    #[arg(long, requires = "panel_axis")]
    panel_values: Option<String>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    svg: Toggle,
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    q: u64,
    /// Adversary fraction; fractions such as `1/3` are accepted.
    #[arg(long, value_parser = parse_real)]
    alpha: f64,
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real)]
    s: Option<f64>,
    #[arg(long, default_value_t = 1000.0)]
    sigma_l1: f64,
    #[arg(long, default_value_t = 1000.0)]
    smoothness_l1: f64,
    #[arg(long, default_value_t = 500.0)]
    f0_minus_fstar: f64,
    #[arg(long, default_value_t = 500)]
    k_iters: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: verify::Suite,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 10.0)]
    grid_max: f64,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    /// A single vote point instead of the default grid; needs --alpha and --p.
    #[arg(long, requires_all = ["alpha", "p"])]
    q: Option<u64>,
    #[arg(long, value_parser = parse_real, requires = "q")]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_real, requires = "q")]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A real number or a fraction `a/b`.
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let bad = || format!("`{text}` is not a number or fraction");
    match text.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(format!("`{text}` divides by zero"));
            }
            Ok(a / b)
        }
        None => text.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Infeasible(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Infeasible(_) => EXIT_INFEASIBLE,
            Failure::Verify(_) => EXIT_VERIFY_FAILED,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run_cli<I, S>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, out, err)),
            Err(e) => Err(Failure::Usage(format!("thread pool: {e}"))),
        },
        None => dispatch(cli.command, out, err),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult<()> {
    match command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

/// Parse a config document. A `provenance` object, as written into
/// manifests, is ignored; any other unknown key is an error.
pub fn parse_config(text: &str) -> crate::Result<RunConfig> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))?;
    if let Value::Object(map) = &mut value {
        map.remove(PROVENANCE_KEY);
    }
    let config: RunConfig = serde_json::from_value(value).map_err(|e| Error::Input(format!("config: {e}")))?;
    Ok(config)
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_failure(p, e))?;
            parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

/// The config with its effective seed plus a `provenance` block.
pub fn manifest_json(config: &RunConfig, extra: Option<Value>) -> String {
    let mut value = serde_json::to_value(config).expect("config serializes");
    let mut provenance = serde_json::json!({
        "tool": TOOL_NAME,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let (Some(Value::Object(extra)), Value::Object(p)) = (extra, &mut provenance) {
        p.extend(extra);
    }
    if let Value::Object(map) = &mut value {
        map.insert(PROVENANCE_KEY.into(), provenance);
    }
    let mut text = serde_json::to_string_pretty(&value).expect("json");
    text.push('\n');
    text
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"))
}

/// Write to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    write_atomic(path, contents.as_bytes()).map_err(|e| io_failure(path, e))
}

fn cmd_run(args: RunArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let result = run(&config)?;
    let dir = out_dir(args.out);
    let trajectory = csv::trajectory_csv(&result);
    if args.check {
        csv::check_trajectory_csv(&trajectory, config.iterations).map_err(|e| Failure::Verify(e.to_string()))?;
    }
    let path = dir.join("trajectory.csv");
    write_file(&path, &trajectory)?;
    write_file(&dir.join("manifest.json"), &manifest_json(&config, None))?;
    let _ = writeln!(
        out,
        "wrote {} ({} rows); f(x0) = {} final f = {}",
        path.display(),
        result.trajectory.len(),
        result.initial_objective(),
        result.final_objective
    );
    Ok(())
}

fn run_file_name(value: &AxisValue, repeat: usize) -> String {
    format!("{}-{}_r{repeat}.csv", value.axis(), value)
}

/// Run one panel of a sweep into `dir`; returns the points.
fn sweep_panel(
    base: &RunConfig,
    values: &[AxisValue],
    repeats: usize,
    dir: &Path,
    check: bool,
    err: &mut (dyn Write + Send),
) -> CliResult<Vec<SweepPoint>> {
    let points = sweep(base, values, repeats)?;
    let summary = csv::summary_csv(&points);
    if check {
        csv::check_summary_csv(&summary, values.len() * repeats).map_err(|e| Failure::Verify(e.to_string()))?;
    }
    for p in &points {
        match &p.result {
            Ok(r) => {
                let text = csv::trajectory_csv(r);
                if check {
                    csv::check_trajectory_csv(&text, r.config.iterations).map_err(|e| Failure::Verify(e.to_string()))?;
                }
                write_file(&dir.join("runs").join(run_file_name(&p.value, p.repeat)), &text)?;
            }
            Err(e) => {
                let _ = writeln!(err, "warning: {}={} repeat {}: {e}", p.value.axis(), p.value, p.repeat);
            }
        }
    }
    write_file(&dir.join("summary.csv"), &summary)?;
    Ok(points)
}

/// Series of mean objective per step, one per axis value, read back from
/// the trajectory CSVs under `dir`.
fn panel_from_csv(title: String, dir: &Path, values: &[AxisValue], repeats: usize) -> CliResult<svg::Panel> {
    let mut series = Vec::new();
    for value in values {
        let mut sum: Vec<f64> = Vec::new();
        let mut steps: Vec<f64> = Vec::new();
        let mut count = 0usize;
        for r in 0..repeats {
            let path = dir.join("runs").join(run_file_name(value, r));
            let Ok(text) = fs::read_to_string(&path) else { continue };
            let table = csv::Table::parse(&text)?;
            let objective = table.reals("objective")?;
            if sum.is_empty() {
                sum = vec![0.0; objective.len()];
                steps = table.reals("step")?;
            }
            if objective.len() != sum.len() {
                return Err(Failure::Usage(format!("{}: trajectory length differs across repeats", path.display())));
            }
            sum.iter_mut().zip(&objective).for_each(|(s, o)| *s += o);
            count += 1;
        }
        if count == 0 {
            continue;
        }
        let points = steps.into_iter().zip(sum.into_iter().map(|s| s / count as f64)).collect();
        series.push(svg::Series { label: format!("{}={}", value.axis(), value), points });
    }
    Ok(svg::Panel { title, series })
}

fn cmd_sweep(args: SweepArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult<()> {
    let mut base = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        base.master_seed = seed;
    }
    let values = args.axis.parse_values(&args.values)?;
    if values.is_empty() {
        return Err(Failure::Usage("--values is empty".into()));
    }
    let panels: Vec<Option<AxisValue>> = match (args.panel_axis, &args.panel_values) {
        (Some(axis), Some(list)) => {
            if axis == args.axis {
                return Err(Failure::Usage("--panel-axis must differ from --axis".into()));
            }
            let pv = axis.parse_values(list)?;
            if pv.is_empty() {
                return Err(Failure::Usage("--panel-values is empty".into()));
            }
            pv.into_iter().map(Some).collect()
        }
        _ => vec![None],
    };
    let dir = out_dir(args.out);

    let mut all_points = 0usize;
    let mut failed: Vec<Error> = Vec::new();
    let mut chart_panels = Vec::new();
    for panel in &panels {
        let (panel_base, panel_dir, title) = match panel {
            Some(pv) => (pv.apply(&base), dir.join(format!("{}-{}", pv.axis(), pv)), format!("{}={}", pv.axis(), pv)),
            None => (base.clone(), dir.clone(), String::new()),
        };
        let points = sweep_panel(&panel_base, &values, args.repeats, &panel_dir, args.check, err)?;
        all_points += points.len();
        failed.extend(points.into_iter().filter_map(|p| p.result.err()));
        if args.svg == Toggle::On {
            chart_panels.push(panel_from_csv(title, &panel_dir, &values, args.repeats)?);
        }
    }

    let sweep_info = serde_json::json!({
        "sweep": {
            "axis": args.axis.name(),
            "values": values.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "panel_axis": args.panel_axis.map(SweepAxis::name),
            "panel_values": panels.iter().flatten().map(ToString::to_string).collect::<Vec<_>>(),
            "repeats": args.repeats,
        }
    });
    write_file(&dir.join("manifest.json"), &manifest_json(&base, Some(sweep_info)))?;
    if args.svg == Toggle::On {
        let chart = svg::line_chart("objective vs step", "step", "objective", &chart_panels);
        write_file(&dir.join("sweep.svg"), &chart)?;
    }
    let _ = writeln!(
        out,
        "wrote {} points ({} failed) under {}",
        all_points,
        failed.len(),
        dir.display()
    );
    if !failed.is_empty() && failed.len() == all_points {
        return Err(failed.swap_remove(0).into());
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn bounds_text(r: &BoundReport) -> String {
    let i = &r.inputs;
    let vacuous = |v: bool| if v { " (vacuous, clamped to 1)" } else { "" };
    let mut s = String::new();
    s.push_str(&format!("q = {}, alpha = {}, p = {}, s = {}\n", i.q, i.alpha, i.p, opt(i.s)));
    s.push_str(&format!(
        "sigma_l1 = {}, smoothness_l1 = {}, f0_minus_fstar = {}, k_iters = {}\n",
        i.sigma_l1, i.smoothness_l1, i.f0_minus_fstar, i.k_iters
    ));
    s.push_str(&format!("alpha threshold 1 - 1/(2p): {}\n", r.alpha_threshold));
    s.push_str(&format!("tolerable adversaries: {}\n", r.tolerable_byzantine_count));
    s.push_str(&format!("wrong-sign bound at s: {}\n", opt(r.lemma1_wrong_sign_bound)));
    s.push_str(&format!(
        "vote failure bound: {}{}\n",
        r.vote_failure_bound.raw,
        vacuous(r.vote_failure_bound.vacuous())
    ));
    if let Some(b) = r.vote_failure_bound_snr {
        s.push_str(&format!("vote failure bound (SNR form): {}{}\n", b.raw, vacuous(b.vacuous())));
    }
    s.push_str(&format!("exact vote failure: {}\n", r.exact_vote_failure));
    s.push_str(&format!("rate bound (proof form): {}\n", r.rate_rhs_proof_form));
    s.push_str(&format!("rate bound (statement form): {}\n", r.rate_rhs_statement_form));
    s
}

fn cmd_bounds(args: BoundsArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    let inputs = BoundInputs {
        q: args.q,
        alpha: args.alpha,
        p: args.p,
        s: args.s,
        sigma_l1: args.sigma_l1,
        smoothness_l1: args.smoothness_l1,
        f0_minus_fstar: args.f0_minus_fstar,
        k_iters: args.k_iters,
    };
    let report = BoundReport::compute(inputs)?;
    let text = match args.format {
        Format::Csv => csv::bounds_csv(&report),
        Format::Text => bounds_text(&report),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(())
}

fn cmd_verify(args: VerifyArgs, out: &mut (dyn Write + Send)) -> CliResult<()> {
    if args.samples == 0 || args.trials == 0 {
        return Err(Failure::Usage("--samples and --trials must be >= 1".into()));
    }
    if !(args.grid_step > 0.0 && args.grid_max > 0.0) {
        return Err(Failure::Usage("--grid-max and --grid-step must be > 0".into()));
    }
    let vote_points = match (args.q, args.alpha, args.p) {
        (Some(q), Some(alpha), Some(p)) => {
            crate::bounds::check_feasible(alpha, p)?;
            Some(vec![(q, alpha, p)])
        }
        _ => None,
    };
    let budget = verify::Budget {
        samples: args.samples,
        trials: args.trials,
        grid_max: args.grid_max,
        grid_step: args.grid_step,
        seed: args.seed,
        vote_points,
        ..verify::Budget::default()
    };
    let checks = verify::run_suite(args.suite, &budget);
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.suite, c.name)).collect();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("failing checks: {}", failed.join("; "))))
    }
}
