//! Command-line front end for `lshawkes-core`.
//!
//! Every subcommand reads and writes plain files (model JSON, event CSV,
//! heatmap CSV/JSON, report JSON). [`run`] returns the process exit code so
//! the binary and the integration tests share one entry point.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lshawkes_core::bandwidth::optimal_bandwidths;
use lshawkes_core::estimate::{
    estimate_bartlett, estimate_mean_density, estimate_mean_density_grid, estimate_tf_grid,
    EstimatorConfig, Feasibility,
};
use lshawkes_core::kernels::read_kernel_table;
use lshawkes_core::model::{
    local_bartlett, local_mean_density, regularized_bartlett, LsHawkesModel,
};
use lshawkes_core::pipeline::{
    analyze, hz_to_rad, ingest_csv, parse_axis, synthetic_sessions, AnalysisConfig, ClockPolicy,
    ExportFormat, HeatmapArtifact, HeatmapMetadata, IngestOptions, DEFAULT_SESSION,
};
use lshawkes_core::simulate::{simulate_ls_hawkes, SimulationConfig};
use lshawkes_core::validate::{
    fit_rate, frequency_bias_scan, mse_experiment, variance_growth_scan, BandwidthPolicy, Target,
};
use lshawkes_core::{EventSeries, FreqKernel, TimeKernel};

#[derive(Debug, Parser)]
#[command(
    name = "lshawkes",
    version,
    about = "Simulate locally stationary Hawkes processes and estimate their local mean density and Bartlett spectrum"
)]
pub struct Cli {
    /// Log verbosity (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one path on [0, T] and write its event times.
    Simulate(SimulateArgs),
    /// Print the local mean density and local Bartlett spectrum of a model.
    Theory(TheoryArgs),
    /// Kernel estimate of the local mean density.
    EstimateDensity(DensityArgs),
    /// Kernel estimate of the local Bartlett spectrum, at a point or on a grid.
    EstimateSpectrum(SpectrumArgs),
    /// Day-indexed CSV: per-day estimates, day average and Poisson normalization.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo and numeric validation suites.
    Validate(ValidateArgs),
    /// Simulate independent trading days and write them as a day-indexed CSV.
    SynthDays(SynthArgs),
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Time kernel: `triangle` or a two-column CSV table (x, value) on [-1/2, 1/2].
    #[arg(long, default_value = "triangle")]
    pub time_kernel: String,
    /// Frequency kernel: `epanechnikov` or a two-column CSV table (x, value).
    #[arg(long, default_value = "epanechnikov")]
    pub freq_kernel: String,
}

impl KernelArgs {
    fn load(&self) -> Result<(TimeKernel, FreqKernel)> {
        let k = match self.time_kernel.as_str() {
            "triangle" => TimeKernel::triangle(),
            path => {
                let (xs, ys) = read_kernel_table(Path::new(path))?;
                TimeKernel::from_table(path, xs, ys)?
            }
        };
        let q = match self.freq_kernel.as_str() {
            "epanechnikov" => FreqKernel::epanechnikov(),
            path => {
                let (xs, ys) = read_kernel_table(Path::new(path))?;
                FreqKernel::from_table(path, xs, ys)?
            }
        };
        Ok((k, q))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeasibilityArg {
    /// Refuse estimates whose smoothing window leaves [0, 1].
    Strict,
    /// Compute them anyway with a warning.
    Warn,
}

impl From<FeasibilityArg> for Feasibility {
    fn from(f: FeasibilityArg) -> Self {
        match f {
            FeasibilityArg::Strict => Feasibility::Strict,
            FeasibilityArg::Warn => Feasibility::Warn,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model specification (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Horizon T in real time units.
    #[arg(long)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Burn-in length; defaults to a multiple of the fertility decay scale.
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Absolute time u in [0, 1].
    #[arg(long)]
    pub u: f64,
    /// Angular frequency (rad per time unit).
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    /// Also print the frequency-smoothed spectrum at this bandwidth.
    #[arg(long)]
    pub b2: Option<f64>,
    #[command(flatten)]
    pub kernels: KernelArgs,
}

#[derive(Debug, Args)]
pub struct EventInput {
    /// Event file (one time per line, `# horizon=` header).
    #[arg(long)]
    pub events: PathBuf,
    /// Horizon T; overrides the file header.
    #[arg(long)]
    pub horizon: Option<f64>,
}

impl EventInput {
    fn load(&self) -> Result<EventSeries> {
        EventSeries::load(&self.events, self.horizon)
            .with_context(|| format!("reading {}", self.events.display()))
    }
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub input: EventInput,
    /// Absolute time of a single estimate.
    #[arg(long, conflicts_with = "times")]
    pub u0: Option<f64>,
    /// Time axis `start:stop:count` or `a,b,c` for a curve.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub b1: f64,
    #[arg(long, value_enum, default_value = "strict")]
    pub feasibility: FeasibilityArg,
    #[command(flatten)]
    pub kernels: KernelArgs,
    /// Output file for the curve (heatmap format); standard output otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: EventInput,
    /// Absolute time of a point estimate.
    #[arg(long, conflicts_with = "times")]
    pub u0: Option<f64>,
    /// Frequency of a point estimate in rad per time unit.
    #[arg(long, conflicts_with_all = ["omega0_hz", "freqs_hz"])]
    pub omega0: Option<f64>,
    /// Frequency of a point estimate in Hz (cycles per time unit).
    #[arg(long, conflicts_with = "freqs_hz")]
    pub omega0_hz: Option<f64>,
    /// Time axis of a grid estimate.
    #[arg(long, requires = "freqs_hz")]
    pub times: Option<String>,
    /// Frequency axis of a grid estimate, in Hz.
    #[arg(long, requires = "times")]
    pub freqs_hz: Option<String>,
    /// Time bandwidth b1 in (0, 1].
    #[arg(long)]
    pub b1: Option<f64>,
    /// Frequency bandwidth in rad per time unit.
    #[arg(long, conflicts_with = "b2_hz")]
    pub b2: Option<f64>,
    /// Frequency bandwidth in Hz.
    #[arg(long)]
    pub b2_hz: Option<f64>,
    /// `auto` derives (b1, b2) from the horizon and --beta; `manual` uses --b1/--b2.
    #[arg(long, default_value = "manual")]
    pub bandwidths: String,
    /// Smoothness exponent for --bandwidths auto.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    /// Gauss–Legendre nodes per unit piece for the quadrature route.
    #[arg(long, default_value_t = 64)]
    pub quad_nodes: usize,
    #[arg(long, value_enum, default_value = "strict")]
    pub feasibility: FeasibilityArg,
    #[command(flatten)]
    pub kernels: KernelArgs,
    /// Output file; grids are written as CSV unless the name ends in `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClockArg {
    /// Reject timestamps outside the session.
    Strict,
    /// Drop them.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV with header `day_id,time_s`.
    #[arg(long)]
    pub input: PathBuf,
    /// Session length in seconds.
    #[arg(long, default_value_t = DEFAULT_SESSION)]
    pub session: f64,
    #[arg(long, value_enum, default_value = "strict")]
    pub clock: ClockArg,
    /// Reject duplicate timestamps instead of separating them.
    #[arg(long)]
    pub no_jitter: bool,
    #[arg(long, default_value_t = 0.15)]
    pub b1: f64,
    /// Frequency bandwidth in Hz.
    #[arg(long, default_value_t = 0.005)]
    pub b2_hz: f64,
    /// Time axis (absolute time).
    #[arg(long, default_value = "0.1:0.9:33")]
    pub times: String,
    /// Frequency axis in Hz.
    #[arg(long, default_value = "0:0.1:50")]
    pub freqs_hz: String,
    #[arg(long, value_enum, default_value = "strict")]
    pub feasibility: FeasibilityArg,
    #[command(flatten)]
    pub kernels: KernelArgs,
    /// Directory receiving mean_density, bartlett and poisson_normalized artifacts.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    /// MSE against horizon and fitted rate.
    Rates,
    /// Variance growth of counts of the frozen process.
    Devbounds,
    /// Frequency-direction smoothing bias against b2.
    Freqbias,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TargetArg {
    MeanDensity,
    Bartlett,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Fixed,
    Optimal,
    MeanOptimal,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub model: PathBuf,
    /// Report file (JSON); standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    /// Absolute time of the target (rates, freqbias) or of the frozen model (devbounds).
    #[arg(long, default_value_t = 0.5)]
    pub u0: f64,
    /// Angular frequency of the spectral target.
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// rates: estimated quantity.
    #[arg(long, value_enum, default_value = "bartlett")]
    pub target: TargetArg,
    /// rates: horizons, as `start:stop:count` or a comma list.
    #[arg(long, default_value = "4096,8192,16384,32768,65536")]
    pub horizons: String,
    /// rates: bandwidth schedule.
    #[arg(long, value_enum, default_value = "optimal")]
    pub policy: PolicyArg,
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub b2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    /// devbounds: window lengths.
    #[arg(long, default_value = "100,300,1000,3000,10000")]
    pub windows: String,
    /// freqbias: frequency bandwidths.
    #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
    pub b2s: String,
    #[command(flatten)]
    pub kernels: KernelArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub days: usize,
    /// Session length in seconds.
    #[arg(long, default_value_t = DEFAULT_SESSION)]
    pub session: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Digits written after the decimal point (3 mimics a millisecond clock).
    #[arg(long, default_value_t = 3)]
    pub decimals: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code: 0 on success, 2 on usage errors, 1 on any other failure.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .try_init();
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            1
        }
    }
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Theory(a) => theory(a),
        Command::EstimateDensity(a) => estimate_density(a),
        Command::EstimateSpectrum(a) => estimate_spectrum(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Validate(a) => validate(a),
        Command::SynthDays(a) => synth_days(a),
    }
}

fn load_model(path: &Path) -> Result<LsHawkesModel> {
    LsHawkesModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

/// Writes `text` to `out`, or to standard output.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn emit_artifact(out: Option<&Path>, art: &HeatmapArtifact) -> Result<()> {
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => {
            art.export(p, ExportFormat::Json)?
        }
        Some(p) => art.export(p, ExportFormat::Csv)?,
        None => art.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let cfg = SimulationConfig {
        burn_in: a.burn_in,
        ..SimulationConfig::with_seed(a.seed)
    };
    let events = simulate_ls_hawkes(&model, a.horizon, &cfg)?;
    match &a.out {
        Some(p) => events.save(p)?,
        None => events.write_to(std::io::stdout().lock())?,
    }
    log::info!("simulated {} events on [0, {}]", events.len(), a.horizon);
    Ok(())
}

fn theory(a: &TheoryArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let m1 = local_mean_density(&model, a.u)?;
    let gamma = local_bartlett(&model, a.u, a.omega)?;
    let mut out = format!(
        "u {}\nomega {}\nlambda_c {}\nzeta {}\nm1 {}\ngamma {}\n",
        a.u,
        a.omega,
        model.lambda_c(a.u),
        model.zeta(a.u),
        m1,
        gamma
    );
    if let Some(b2) = a.b2 {
        let (_, q) = a.kernels.load()?;
        out.push_str(&format!(
            "gamma_b2 {}\n",
            regularized_bartlett(&model, a.u, a.omega, b2, &q)?
        ));
    }
    emit(None, &out)
}

fn estimate_density(a: &DensityArgs) -> Result<()> {
    let events = a.input.load()?;
    let (k, _) = a.kernels.load()?;
    let mode = a.feasibility.into();
    match (&a.u0, &a.times) {
        (Some(u0), None) => {
            let m = estimate_mean_density(&events, *u0, a.b1, &k, mode)?;
            emit_json(
                a.out.as_deref(),
                &json!({ "u0": u0, "b1": a.b1, "horizon": events.horizon(), "events": events.len(), "m1_hat": m }),
            )
        }
        (None, Some(spec)) => {
            let times = parse_axis(spec)?;
            let grid = estimate_mean_density_grid(&events, &times, a.b1, &k, mode)?;
            emit_artifact(
                a.out.as_deref(),
                &HeatmapArtifact::from_grid(&grid, &[0.0], None)?,
            )
        }
        _ => bail!("give either --u0 or --times"),
    }
}

fn spectrum_bandwidths(a: &SpectrumArgs, horizon: f64) -> Result<(f64, f64)> {
    match a.bandwidths.as_str() {
        "auto" => {
            let plan = optimal_bandwidths(horizon, a.beta, a.c1, a.c2)?;
            log::info!("bandwidths b1 = {}, b2 = {}", plan.b1, plan.b2);
            Ok((plan.b1, plan.b2))
        }
        "manual" => {
            let b1 = a.b1.context("--b1 is required unless --bandwidths auto")?;
            let b2 = match (a.b2, a.b2_hz) {
                (Some(b2), None) => b2,
                (None, Some(f)) => hz_to_rad(f),
                _ => bail!("give one of --b2 or --b2-hz unless --bandwidths auto"),
            };
            Ok((b1, b2))
        }
        other => bail!("--bandwidths must be `auto` or `manual`, got `{other}`"),
    }
}

fn estimate_spectrum(a: &SpectrumArgs) -> Result<()> {
    let events = a.input.load()?;
    let (k, q) = a.kernels.load()?;
    let (b1, b2) = spectrum_bandwidths(a, events.horizon())?;
    let cfg = EstimatorConfig {
        quad_nodes: a.quad_nodes,
        feasibility: a.feasibility.into(),
        ..EstimatorConfig::new(b1, b2)
    };
    if let (Some(ts), Some(fs_hz)) = (&a.times, &a.freqs_hz) {
        let times = parse_axis(ts)?;
        let freqs_hz = parse_axis(fs_hz)?;
        let freqs: Vec<f64> = freqs_hz.iter().map(|&f| hz_to_rad(f)).collect();
        let grid = estimate_tf_grid(&events, &times, &freqs, &cfg, &k, &q)?;
        let meta = HeatmapMetadata {
            kind: grid.kind,
            time_kernel: k.name().to_string(),
            freq_kernel: q.name().to_string(),
            b1,
            b2_hz: b2 / (2.0 * std::f64::consts::PI),
            b2_rad_per_s: b2,
            session_s: events.horizon(),
            n_days: 1,
            days: Vec::new(),
        };
        return emit_artifact(
            a.out.as_deref(),
            &HeatmapArtifact::from_grid(&grid, &freqs_hz, Some(meta))?,
        );
    }
    let u0 =
        a.u0.context("give --u0 with --omega0/--omega0-hz, or --times with --freqs-hz")?;
    let omega0 = match (a.omega0, a.omega0_hz) {
        (Some(w), None) => w,
        (None, Some(f)) => hz_to_rad(f),
        (None, None) => 0.0,
        _ => unreachable!("clap rejects both"),
    };
    let g = estimate_bartlett(&events, u0, omega0, &cfg, &k, &q)?;
    emit_json(
        a.out.as_deref(),
        &json!({
            "u0": u0, "omega0": omega0, "b1": b1, "b2": b2,
            "horizon": events.horizon(), "events": events.len(), "gamma_hat": g,
        }),
    )
}

fn analyze_cmd(a: &AnalyzeArgs) -> Result<()> {
    let table = ingest_csv(
        &a.input,
        &IngestOptions {
            session: a.session,
            clock: match a.clock {
                ClockArg::Strict => ClockPolicy::Strict,
                ClockArg::Clip => ClockPolicy::Clip,
            },
            jitter_duplicates: !a.no_jitter,
        },
    )
    .with_context(|| format!("reading {}", a.input.display()))?;
    let (k, q) = a.kernels.load()?;
    let cfg = AnalysisConfig {
        times: parse_axis(&a.times)?,
        freqs_hz: parse_axis(&a.freqs_hz)?,
        b1: a.b1,
        b2_hz: a.b2_hz,
        feasibility: a.feasibility.into(),
    };
    let out = analyze(&table, &cfg, &k, &q)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let artifacts = [
        ("mean_density", &out.mean_density),
        ("bartlett", &out.bartlett),
        ("poisson_normalized", &out.poisson_normalized),
    ];
    for (name, art) in artifacts {
        if matches!(a.format, FormatArg::Csv | FormatArg::Both) {
            art.export(a.out_dir.join(format!("{name}.csv")), ExportFormat::Csv)?;
        }
        if matches!(a.format, FormatArg::Json | FormatArg::Both) {
            art.export(a.out_dir.join(format!("{name}.json")), ExportFormat::Json)?;
        }
    }
    for d in out.days.iter().filter(|d| d.error.is_some()) {
        eprintln!(
            "warning: day {} skipped: {}",
            d.day_id,
            d.error.as_deref().unwrap_or("")
        );
    }
    Ok(())
}

fn validate(a: &ValidateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let (k, q) = a.kernels.load()?;
    match a.suite {
        Suite::Rates => {
            let horizons = parse_axis(&a.horizons)?;
            let policy = match a.policy {
                PolicyArg::Fixed => BandwidthPolicy::Fixed {
                    b1: a.b1.context("--policy fixed needs --b1")?,
                    b2: a.b2.unwrap_or(1.0),
                },
                PolicyArg::Optimal => BandwidthPolicy::Optimal {
                    beta: a.beta,
                    c1: a.c1,
                    c2: a.c2,
                },
                PolicyArg::MeanOptimal => BandwidthPolicy::MeanOptimal { beta: a.beta },
            };
            let target = match a.target {
                TargetArg::MeanDensity => Target::MeanDensity,
                TargetArg::Bartlett => Target::Bartlett,
            };
            let report = mse_experiment(
                &model,
                target,
                a.u0,
                a.omega0,
                &horizons,
                a.replicates,
                policy,
                &k,
                &q,
                a.seed,
            )?;
            let fit = fit_rate(&report).ok();
            emit_json(
                a.out.as_deref(),
                &json!({ "suite": "rates", "report": report, "fit": fit }),
            )
        }
        Suite::Devbounds => {
            let windows = parse_axis(&a.windows)?;
            let report = variance_growth_scan(&model, a.u0, &windows, a.replicates, a.seed)?;
            emit_json(
                a.out.as_deref(),
                &json!({ "suite": "devbounds", "report": report }),
            )
        }
        Suite::Freqbias => {
            let b2s = parse_axis(&a.b2s)?;
            let report = frequency_bias_scan(&model, a.u0, a.omega0, &b2s, &q)?;
            emit_json(
                a.out.as_deref(),
                &json!({ "suite": "freqbias", "report": report }),
            )
        }
    }
}

fn synth_days(a: &SynthArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let table = synthetic_sessions(&model, a.session, a.days, a.seed)?;
    table
        .save_csv(&a.out, a.decimals)
        .with_context(|| format!("writing {}", a.out.display()))?;
    log::info!("wrote {} days to {}", table.days.len(), a.out.display());
    Ok(())
}
