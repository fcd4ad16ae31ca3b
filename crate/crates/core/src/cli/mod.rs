//! Command-line front end. Each subcommand writes a table to stdout or to
//! `--output`; failures print a JSON error record on stderr.

mod output;

pub use output::{Cell, Format, Table};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::config::RunConfig;
use crate::detector::{prob_detection, prob_false_alarm, roc_point, threshold_for_pf, DetectorConfig};
use crate::energy::{average_energy, energy, spread_indices, ChannelSet, EnergyMode};
use crate::error::{Error, Result};
use crate::model::{zeta, LinkGeometry, Point, ReflectionParams, ZetaMode, DEFAULT_SERIES_TERMS};
use crate::pipeline::{
    calibrate_sigma, default_taps, estimate_baseline, evaluate_trace, filter_trace, fir, format_trace,
    generate_trace, read_trace, residual_windows, BaselineProfile, CalibrationResult, NoiseModel, RssRecord,
    Segment, SynthConfig,
};
use crate::simulate::{binomial_std, empirical_rates, SimSpec};
use crate::spatial::{pd_map, pd_vs_delta, plan_distance, GridSpec, PlanOutcome, PlanRequest};

#[derive(Debug, Parser)]
#[command(name = "rss-reflect", version, about = "Reflection model and multi-channel RSS energy detector")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ζ against Δ or β.
    Model(ModelArgs),
    /// Exact, two-term closed-form and average energy sweeps.
    Energy(EnergyArgs),
    /// ROC curves over channel counts and SNRs.
    Roc(RocArgs),
    /// P_d against Δ.
    Pd(PdArgs),
    /// P_d over a rectangular grid.
    Pdmap(PdmapArgs),
    /// Detection thresholds for given noise levels.
    Threshold(ThresholdArgs),
    /// Monte Carlo check of P_d and P_f.
    Simulate(SimulateArgs),
    /// Per-channel baseline from a vacant-room trace (TOML).
    Baseline(BaselineArgs),
    /// Noise calibration from a vacant-room trace (TOML).
    Calibrate(CalibrateArgs),
    /// Sweep-by-sweep detection on a trace.
    Detect(DetectArgs),
    /// Shortest link length meeting a P_d target.
    Plan(PlanArgs),
    /// Synthetic grid-walk trace.
    SynthTrace(SynthArgs),
}

#[derive(Debug, Clone, Args)]
struct Physics {
    #[arg(long)]
    gamma: Option<f64>,
    /// Path-loss exponent η.
    #[arg(long)]
    eta: Option<f64>,
    /// Link length in metres (TX at the origin, RX on the x axis).
    #[arg(long = "distance", alias = "d")]
    distance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct Range {
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelSweep {
    Delta,
    Beta,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long, value_enum, default_value_t = ModelSweep::Delta)]
    vs: ModelSweep,
    /// Fixed Δ for a β sweep, metres.
    #[arg(long)]
    delta: Option<f64>,
    /// Fixed β for a Δ sweep, cycles per metre (default: mean over channels).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SERIES_TERMS)]
    terms: usize,
    #[command(flatten)]
    range: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnergySweep {
    Delta,
    Channels,
    Distance,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long, value_enum, default_value_t = EnergySweep::Delta)]
    vs: EnergySweep,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[command(flatten)]
    range: Range,
}

#[derive(Debug, Args)]
struct RocArgs {
    #[arg(long = "channels", alias = "C", value_delimiter = ',', default_values_t = vec![2usize, 4, 8, 16])]
    channels: Vec<usize>,
    /// Per-channel SNR E/(Cσ²), linear.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0f64, 2.0, 4.0, 8.0])]
    snr: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pf_min: f64,
    #[arg(long, default_value_t = 0.999)]
    pf_max: f64,
    #[arg(long, default_value_t = 81)]
    points: usize,
}

#[derive(Debug, Args)]
struct PdArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    pf: Option<f64>,
    #[command(flatten)]
    range: Range,
}

#[derive(Debug, Args)]
struct PdmapArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    pf: Option<f64>,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 3.5, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
    y_min: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    y_max: f64,
    #[arg(long, default_value_t = 0.02)]
    resolution: f64,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long = "channels", alias = "C", value_delimiter = ',')]
    channels: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    #[arg(long)]
    pf: Option<f64>,
    /// Evaluate the built-in table of calibrated noise levels.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "channels", alias = "C", value_delimiter = ',')]
    channels: Vec<usize>,
    /// Per-channel SNR values; when omitted the reflection model sets the signal.
    #[arg(long, value_delimiter = ',')]
    snr: Vec<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    pf: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
struct TraceInput {
    /// Trace file (`timestamp, channel, rss_dbm[, point]`).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Low-pass filter each channel stream before use.
    #[arg(long)]
    filter: bool,
    /// FIR taps file (default: 65-tap 1 Hz design).
    #[arg(long)]
    taps: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: TraceInput,
    /// Number of channels in the trace.
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    input: TraceInput,
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Channels used per decision, spread over the trace's channel set.
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[arg(long)]
    pf: Option<f64>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: TraceInput,
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Calibration file supplying σ̂.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Noise level when no calibration file is given.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[arg(long)]
    pf: Option<f64>,
    /// One row per sweep instead of per-point ratios.
    #[arg(long)]
    windows: bool,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long)]
    target_pd: f64,
    #[arg(long)]
    pf: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    delta_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    delta_hi: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "channels", alias = "C")]
    channels: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    d_min: f64,
    #[arg(long, default_value_t = 50.0)]
    d_max: f64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    x_min: f64,
    #[arg(long, default_value_t = 2.5)]
    x_max: f64,
    #[arg(long, default_value_t = 0.5)]
    y_min: f64,
    #[arg(long, default_value_t = 2.5)]
    y_max: f64,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    /// Sweeps recorded at each grid point.
    #[arg(long, default_value_t = 937)]
    sweeps_per_point: usize,
    /// Leading vacant sweeps.
    #[arg(long, default_value_t = 3750)]
    vacant_sweeps: usize,
    /// Probability of a positive exponential noise excursion.
    #[arg(long, default_value_t = 0.0)]
    skew_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    skew_mean: f64,
    #[arg(long)]
    seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            print_error("usage", &e.to_string());
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            print_error(e.kind(), &e.to_string());
            1
        }
    }
}

fn print_error(kind: &str, message: &str) {
    let record = serde_json::json!({ "error": { "kind": kind, "message": message.trim() } });
    eprintln!("{record}");
}

fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::resolve(cli.config.as_deref())?;
    let out = cli.output.as_deref();
    let table = match &cli.command {
        Command::Model(a) => model(&cfg, a)?,
        Command::Energy(a) => energy_cmd(&cfg, a)?,
        Command::Roc(a) => roc(a)?,
        Command::Pd(a) => pd(&cfg, a)?,
        Command::Pdmap(a) => pdmap(&cfg, a)?,
        Command::Threshold(a) => threshold(&cfg, a)?,
        Command::Simulate(a) => simulate(&cfg, a)?,
        Command::Detect(a) => detect(&cfg, a)?,
        Command::Plan(a) => plan(&cfg, a)?,
        Command::Baseline(a) => return output::emit(&baseline(&cfg, a)?.to_toml()?, out),
        Command::Calibrate(a) => return output::emit(&calibrate(&cfg, a)?.to_toml()?, out),
        Command::SynthTrace(a) => return output::emit(&format_trace(&synth(&cfg, a)?), out),
    };
    output::emit(&table.render(cli.format)?, out)
}

fn geometry(cfg: &RunConfig, physics: &Physics) -> Result<LinkGeometry> {
    match physics.distance {
        Some(d) => LinkGeometry::new(Point::new(0.0, 0.0), Point::new(d, 0.0)),
        None => cfg.geometry.link(),
    }
}

fn reflection(cfg: &RunConfig, physics: &Physics, delta: Option<f64>) -> Result<ReflectionParams> {
    ReflectionParams::new(
        physics.gamma.unwrap_or(cfg.reflection.gamma),
        physics.eta.unwrap_or(cfg.reflection.path_loss_exponent),
        delta.unwrap_or(cfg.reflection.delta_m),
    )
}

fn channel_set(cfg: &RunConfig, count: Option<usize>) -> Result<ChannelSet> {
    let mut c = cfg.channels.clone();
    if let Some(n) = count {
        c.count = n;
    }
    c.channel_set()
}

fn steps(range: &Range, default: (f64, f64, f64)) -> Result<Vec<f64>> {
    let from = range.from.unwrap_or(default.0);
    let to = range.to.unwrap_or(default.1);
    let step = range.step.unwrap_or(default.2);
    if !(step > 0.0) || !(to >= from) {
        return Err(Error::invalid("range", "need step > 0 and to >= from"));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| from + k as f64 * step).collect())
}

fn model(cfg: &RunConfig, a: &ModelArgs) -> Result<Table> {
    if a.terms == 0 {
        return Err(Error::invalid("terms", "at least one term required"));
    }
    let d = geometry(cfg, &a.physics)?.distance();
    let base = reflection(cfg, &a.physics, a.delta)?;
    let channels = channel_set(cfg, None)?;
    let mut t = Table::new(&["delta_m", "beta_per_m", "zeta_closed_db", "zeta_series_db", "zeta_two_term_db"]);
    let points: Vec<(f64, f64)> = match a.vs {
        ModelSweep::Delta => {
            let beta = a.beta.unwrap_or_else(|| channels.mean_beta());
            steps(&a.range, (0.0, 5.0, 0.01))?.into_iter().map(|x| (x, beta)).collect()
        }
        ModelSweep::Beta => {
            let lo = channels.frequencies()[0] / channels.propagation_speed();
            let hi = lo + 0.3;
            let delta = base.delta();
            steps(&a.range, (lo, hi, 0.0005))?.into_iter().map(|b| (delta, b)).collect()
        }
    };
    for (delta, beta) in points {
        let p = base.with_delta(delta)?;
        t.push(vec![
            delta.into(),
            beta.into(),
            zeta(&p, d, beta, ZetaMode::Closed).into(),
            zeta(&p, d, beta, ZetaMode::Series(a.terms)).into(),
            zeta(&p, d, beta, ZetaMode::TwoTerm).into(),
        ]);
    }
    Ok(t)
}

fn energy_cmd(cfg: &RunConfig, a: &EnergyArgs) -> Result<Table> {
    let base = reflection(cfg, &a.physics, a.delta)?;
    let d0 = geometry(cfg, &a.physics)?.distance();
    let mut t = Table::new(&[
        "delta_m",
        "distance_m",
        "channels",
        "exact_db2",
        "closed_two_term_db2",
        "average_db2",
    ]);
    let mut row = |p: &ReflectionParams, d: f64, ch: &ChannelSet| -> Result<()> {
        let closed = energy(p, d, ch, EnergyMode::ClosedTwoTerm).ok().map(|e| e.value);
        t.push(vec![
            p.delta().into(),
            d.into(),
            ch.len().into(),
            energy(p, d, ch, EnergyMode::Exact)?.value.into(),
            closed.into(),
            average_energy(p, d, ch.len()).into(),
        ]);
        Ok(())
    };
    match a.vs {
        EnergySweep::Delta => {
            let ch = channel_set(cfg, a.channels)?;
            for delta in steps(&a.range, (0.0, 5.0, 0.001))? {
                row(&base.with_delta(delta)?, d0, &ch)?;
            }
        }
        EnergySweep::Channels => {
            let max = a.channels.unwrap_or(cfg.channels.count) as f64;
            for c in steps(&a.range, (1.0, max, 1.0))? {
                row(&base, d0, &channel_set(cfg, Some(c.round() as usize))?)?;
            }
        }
        EnergySweep::Distance => {
            let ch = channel_set(cfg, a.channels)?;
            for d in steps(&a.range, (1.0, 10.0, 0.1))? {
                row(&base, d, &ch)?;
            }
        }
    }
    Ok(t)
}

fn roc(a: &RocArgs) -> Result<Table> {
    if a.points < 2 || !(a.pf_min > 0.0 && a.pf_min < a.pf_max && a.pf_max < 1.0) {
        return Err(Error::invalid("pf range", "need 0 < pf_min < pf_max < 1 and points >= 2"));
    }
    let mut t = Table::new(&["channels", "snr", "pf", "pd"]);
    let (lo, hi) = (a.pf_min.log10(), a.pf_max.log10());
    for &c in &a.channels {
        for &snr in &a.snr {
            for k in 0..a.points {
                let pf = 10f64.powf(lo + (hi - lo) * k as f64 / (a.points - 1) as f64);
                t.push(vec![c.into(), snr.into(), pf.into(), roc_point(c, 1.0, snr * c as f64, pf)?.into()]);
            }
        }
    }
    Ok(t)
}

fn pd(cfg: &RunConfig, a: &PdArgs) -> Result<Table> {
    let ch = channel_set(cfg, a.channels)?;
    let d = geometry(cfg, &a.physics)?.distance();
    let deltas = steps(&a.range, (0.0, 5.0, 0.01))?;
    let curve = pd_vs_delta(
        a.physics.gamma.unwrap_or(cfg.reflection.gamma),
        a.physics.eta.unwrap_or(cfg.reflection.path_loss_exponent),
        d,
        &ch,
        a.sigma.unwrap_or(cfg.detector.sigma_db),
        a.pf.unwrap_or(cfg.detector.pf),
        &deltas,
    )?;
    let mut t = Table::new(&["delta_m", "energy_db2", "average_energy_db2", "pd"]);
    for p in curve {
        t.push(vec![p.delta.into(), p.energy.into(), p.average_energy.into(), p.pd.into()]);
    }
    Ok(t)
}

fn pdmap(cfg: &RunConfig, a: &PdmapArgs) -> Result<Table> {
    let geom = geometry(cfg, &a.physics)?;
    let grid = GridSpec::new((a.x_min, a.x_max), (a.y_min, a.y_max), a.resolution)?;
    let map = pd_map(
        &geom,
        &grid,
        a.physics.gamma.unwrap_or(cfg.reflection.gamma),
        a.physics.eta.unwrap_or(cfg.reflection.path_loss_exponent),
        &channel_set(cfg, a.channels)?,
        a.sigma.unwrap_or(cfg.detector.sigma_db),
        a.pf.unwrap_or(cfg.detector.pf),
    )?;
    let mut t = Table::new(&["x_m", "y_m", "delta_m", "energy_db2", "pd", "valid"]);
    for c in &map.cells {
        t.push(vec![c.x.into(), c.y.into(), c.delta.into(), c.energy.into(), c.pd.into(), c.valid.into()]);
    }
    Ok(t)
}

/// Calibrated noise levels `(link length m, device, σ̂ dB)` from a reference
/// two-room measurement campaign.
pub const REFERENCE_SIGMA_HAT: [(f64, &str, f64); 4] = [
    (2.0, "rsa", 0.1328),
    (2.0, "node", 0.16),
    (3.0, "rsa", 0.138),
    (3.0, "node", 0.19),
];

fn threshold(cfg: &RunConfig, a: &ThresholdArgs) -> Result<Table> {
    let pf = a.pf.unwrap_or(cfg.detector.pf);
    if a.table {
        let mut t = Table::new(&["distance_m", "device", "channels", "sigma_hat_db", "pf", "threshold_db2"]);
        for (d, dev, s) in REFERENCE_SIGMA_HAT {
            for c in [2usize, 4, 8, 16] {
                t.push(vec![
                    d.into(),
                    dev.into(),
                    c.into(),
                    s.into(),
                    pf.into(),
                    Cell::Fixed(threshold_for_pf(c, s, pf)?, 4),
                ]);
            }
        }
        return Ok(t);
    }
    let channels = if a.channels.is_empty() { vec![cfg.channels.count] } else { a.channels.clone() };
    let sigmas = if a.sigma.is_empty() { vec![cfg.detector.sigma_db] } else { a.sigma.clone() };
    let mut t = Table::new(&["channels", "sigma_db", "pf", "threshold_db2"]);
    for &c in &channels {
        for &s in &sigmas {
            t.push(vec![c.into(), s.into(), pf.into(), Cell::Fixed(threshold_for_pf(c, s, pf)?, 4)]);
        }
    }
    Ok(t)
}

/// Decorrelated sub-seed for the `index`-th run of a batch.
fn sub_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn simulate(cfg: &RunConfig, a: &SimulateArgs) -> Result<Table> {
    let sigma = a.sigma.unwrap_or(cfg.detector.sigma_db);
    let pf = a.pf.unwrap_or(cfg.detector.pf);
    let seed = a.seed.unwrap_or(cfg.seed);
    let channel_counts = if a.channels.is_empty() { vec![cfg.channels.count] } else { a.channels.clone() };
    let mut t = Table::new(&[
        "hypothesis",
        "channels",
        "snr",
        "signal_energy_db2",
        "sigma_db",
        "threshold_db2",
        "trials",
        "detections",
        "empirical_rate",
        "predicted_rate",
        "binomial_std",
        "z_score",
    ]);
    let mut index = 0u64;
    for &c in &channel_counts {
        let x = threshold_for_pf(c, sigma, pf)?;
        let signals: Vec<Vec<f64>> = if a.snr.is_empty() {
            let d = geometry(cfg, &a.physics)?.distance();
            let p = reflection(cfg, &a.physics, a.delta)?;
            let ch = channel_set(cfg, Some(c))?;
            vec![ch.betas().map(|b| zeta(&p, d, b, ZetaMode::Closed)).collect()]
        } else {
            a.snr.iter().map(|s| vec![sigma * s.sqrt(); c]).collect()
        };
        let mut jobs: Vec<(&str, Vec<f64>)> = signals.into_iter().map(|s| ("occupied", s)).collect();
        jobs.push(("vacant", vec![0.0; c]));
        for (hyp, signal) in jobs {
            let spec = SimSpec::with_means(signal, sigma, a.trials, sub_seed(seed, index))?;
            index += 1;
            let e = spec.signal_energy();
            let rates = empirical_rates(&spec, x);
            let predicted = if e == 0.0 {
                prob_false_alarm(c, sigma, x)?
            } else {
                prob_detection(c, sigma, e, x)?
            };
            let sd = binomial_std(predicted, a.trials);
            let z = if sd > 0.0 { (rates.detection_rate - predicted) / sd } else { 0.0 };
            t.push(vec![
                hyp.into(),
                c.into(),
                (e / (c as f64 * sigma * sigma)).into(),
                e.into(),
                sigma.into(),
                x.into(),
                a.trials.into(),
                rates.detections.into(),
                rates.detection_rate.into(),
                predicted.into(),
                sd.into(),
                z.into(),
            ]);
        }
    }
    Ok(t)
}

fn load_records(cfg: &RunConfig, input: &TraceInput) -> Result<Vec<RssRecord>> {
    let path = input
        .trace
        .as_deref()
        .or(cfg.io.trace_path.as_deref())
        .ok_or_else(|| Error::Config("no trace file given (--trace or io.trace_path)".into()))?;
    let records = read_trace(path)?;
    if !input.filter {
        return Ok(records);
    }
    let taps = match input.taps.as_deref().or(cfg.io.taps_path.as_deref()) {
        Some(p) => fir::load_taps(p)?,
        None => default_taps(),
    };
    Ok(filter_trace(&records, &taps))
}

fn required<'a>(flag: Option<&'a Path>, fallback: Option<&'a Path>, what: &str) -> Result<&'a Path> {
    flag.or(fallback)
        .ok_or_else(|| Error::Config(format!("no {what} file given")))
}

fn baseline(cfg: &RunConfig, a: &BaselineArgs) -> Result<BaselineProfile> {
    let records = load_records(cfg, &a.input)?;
    estimate_baseline(&records, a.channels.unwrap_or(cfg.channels.count))
}

fn subset_for(baseline: &BaselineProfile, count: Option<usize>) -> Result<Vec<usize>> {
    spread_indices(baseline.len(), count.unwrap_or(baseline.len()))
}

fn calibrate(cfg: &RunConfig, a: &CalibrateArgs) -> Result<CalibrationResult> {
    let records = load_records(cfg, &a.input)?;
    let bpath = required(a.baseline.as_deref(), cfg.io.baseline_path.as_deref(), "baseline")?;
    let profile = BaselineProfile::load(bpath)?;
    let subset = subset_for(&profile, a.channels)?;
    let (residuals, skipped) = residual_windows(&records, &profile, &subset, cfg.detector.sweep_period_s)?;
    if skipped > 0 {
        info!("{skipped} incomplete sweeps skipped");
    }
    calibrate_sigma(&residuals, subset.len(), a.pf.unwrap_or(cfg.detector.pf))
}

fn detect(cfg: &RunConfig, a: &DetectArgs) -> Result<Table> {
    let records = load_records(cfg, &a.input)?;
    let bpath = required(a.baseline.as_deref(), cfg.io.baseline_path.as_deref(), "baseline")?;
    let profile = BaselineProfile::load(bpath)?;
    let subset = subset_for(&profile, a.channels)?;
    let calibration = match a.calibration.as_deref().or(cfg.io.calibration_path.as_deref()) {
        Some(p) => Some(CalibrationResult::load(p)?),
        None => None,
    };
    let sigma = match (a.sigma, calibration) {
        (Some(s), _) => s,
        (None, Some(c)) => {
            if c.channels != subset.len() {
                return Err(Error::Config(format!(
                    "calibration was made for {} channels, detection uses {}",
                    c.channels,
                    subset.len()
                )));
            }
            c.sigma_hat
        }
        (None, None) => cfg.detector.sigma_db,
    };
    let pf = a.pf.or(calibration.map(|c| c.target_pf)).unwrap_or(cfg.detector.pf);
    let det = DetectorConfig::new(subset.len(), sigma, pf)?;
    let ev = evaluate_trace(&records, &profile, &det, &subset, cfg.detector.sweep_period_s)?;
    info!("{} sweeps, {} skipped, threshold {}", ev.sweeps, ev.skipped, ev.threshold);
    if a.windows {
        let mut t = Table::new(&["start_s", "point", "energy_db2", "threshold_db2", "occupied"]);
        for d in &ev.decisions {
            t.push(vec![
                d.start.into(),
                d.point.clone().into(),
                d.energy.into(),
                ev.threshold.into(),
                d.occupied.into(),
            ]);
        }
        return Ok(t);
    }
    let mut t = Table::new(&["point", "decisions", "detections", "ratio"]);
    for p in &ev.points {
        t.push(vec![p.point.clone().into(), p.decisions.into(), p.detections.into(), p.ratio.into()]);
    }
    t.push(vec![
        "all".into(),
        ev.decisions.len().into(),
        ev.detections().into(),
        ev.detection_ratio().into(),
    ]);
    Ok(t)
}

fn plan(cfg: &RunConfig, a: &PlanArgs) -> Result<Table> {
    let req = PlanRequest {
        target_pd: a.target_pd,
        pf: a.pf.unwrap_or(cfg.detector.pf),
        delta_band: (a.delta_lo, a.delta_hi),
        gamma: a.gamma.unwrap_or(cfg.reflection.gamma),
        eta: a.eta.unwrap_or(cfg.reflection.path_loss_exponent),
        channels: a.channels.unwrap_or(cfg.channels.count),
        sigma: a.sigma.unwrap_or(cfg.detector.sigma_db),
        d_range: (a.d_min, a.d_max),
    };
    let mut t = Table::new(&["status", "distance_m", "pd", "target_pd"]);
    match plan_distance(&req)? {
        PlanOutcome::Feasible { distance, achieved_pd } => {
            t.push(vec!["feasible".into(), distance.into(), achieved_pd.into(), a.target_pd.into()])
        }
        PlanOutcome::Infeasible { best_distance, best_pd } => {
            t.push(vec!["infeasible".into(), best_distance.into(), best_pd.into(), a.target_pd.into()])
        }
    }
    Ok(t)
}

fn synth(cfg: &RunConfig, a: &SynthArgs) -> Result<Vec<RssRecord>> {
    let geom = geometry(cfg, &a.physics)?;
    let params = reflection(cfg, &a.physics, None)?;
    let ch = channel_set(cfg, None)?;
    let sigma = a.sigma.unwrap_or(cfg.detector.sigma_db);
    let noise = if a.skew_prob > 0.0 {
        NoiseModel::Skewed {
            sigma,
            prob: a.skew_prob,
            tail_mean: a.skew_mean,
        }
    } else {
        NoiseModel::Gaussian { sigma }
    };
    let grid = GridSpec::new(
        (a.x_min - 0.5 * a.spacing, a.x_max + 0.5 * a.spacing),
        (a.y_min - 0.5 * a.spacing, a.y_max + 0.5 * a.spacing),
        a.spacing,
    )?;
    let mut segments = vec![Segment::vacant(ch.len(), a.vacant_sweeps)];
    for (k, p) in grid.centers().into_iter().enumerate() {
        let id = format!("p{:02}_{:.2}_{:.2}", k, p.x, p.y);
        segments.push(Segment::reflector(&params, &geom, p, &ch, a.sweeps_per_point, id)?);
    }
    let config = SynthConfig::sloped(
        ch.len(),
        noise,
        cfg.detector.sweep_period_s,
        a.seed.unwrap_or(cfg.seed),
    );
    generate_trace(&config, &segments)
}
