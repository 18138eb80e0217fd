//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or fit error. Diagnostics
//! go to stderr only; stdout carries results.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chain::{self, CellResult, ChainConfig};
use crate::components::{
    build_mixer_model, build_osc_model, build_pa_model, ComponentModel, FitOptions, ModelFile,
    DEFAULT_MIXER_PIF_IN_DBM,
};
use crate::dataset::{
    correlation_matrix, load_mixer_csv, load_osc_csv, load_pa_csv, CellIssue, Dataset,
    SurveyRecord, PA_CORRELATION_FEATURES,
};
use crate::plot;
use crate::regression::{
    Curve, FitReport, FrequencyCurve, DEFAULT_BEST_POINT_WEIGHT, DEFAULT_BINS,
};
use crate::units::{FrequencyGhz, PowerDbm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wnoc-power",
    version,
    about = "DC power models for mm-wave transmitter front-ends"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a component model from a survey CSV
    Fit(FitArgs),
    /// Evaluate a model at one frequency
    Query(QueryArgs),
    /// Transmitter DC power breakdown at a few frequencies
    Breakdown(BreakdownArgs),
    /// Breakdown over a dense frequency grid
    Sweep(SweepArgs),
    /// Correlation matrix of PA survey features
    Corr(CorrArgs),
    /// Render a breakdown table or a model as SVG
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    Pa,
    Osc,
    Mixer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub component: ComponentArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Log-spaced frequency bins for best-point selection
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Weight of best points in the exponential fits
    #[arg(long = "bp-weight", default_value_t = DEFAULT_BEST_POINT_WEIGHT)]
    pub bp_weight: f64,
    /// Keep rows whose technology contains this text (case-insensitive)
    #[arg(long)]
    pub tech: Option<String>,
    /// Fixed IF input level stored with a mixer model (dBm)
    #[arg(long = "pif-in", allow_negative_numbers = true, default_value_t = DEFAULT_MIXER_PIF_IN_DBM)]
    pub pif_in: f64,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Frequency in GHz
    #[arg(long)]
    pub freq: f64,
    /// PA output power (dBm)
    #[arg(long = "p-out", allow_negative_numbers = true)]
    pub p_out: Option<f64>,
    /// PA input power (dBm)
    #[arg(long = "p-in", allow_negative_numbers = true)]
    pub p_in: Option<f64>,
    /// Oscillator RF output power (dBm)
    #[arg(long = "p-rf", allow_negative_numbers = true)]
    pub p_rf: Option<f64>,
    /// Mixer RF output power (dBm)
    #[arg(long = "p-rf-out", allow_negative_numbers = true)]
    pub p_rf_out: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ChainModelArgs {
    #[arg(long)]
    pub pa: PathBuf,
    #[arg(long)]
    pub mixer: PathBuf,
    #[arg(long)]
    pub osc: PathBuf,
    /// Mixer output levels (dBm), comma separated
    #[arg(long = "mixer-pout", value_delimiter = ',', allow_hyphen_values = true)]
    pub mixer_pout: Vec<f64>,
    /// PA output power (dBm)
    #[arg(long = "pa-pout", allow_negative_numbers = true, default_value_t = 0.0)]
    pub pa_pout: f64,
    /// Oscillator RF output power (dBm)
    #[arg(long = "osc-prf", allow_negative_numbers = true, default_value_t = -10.0)]
    pub osc_prf: f64,
    /// Mixer IF input (dBm); defaults to the level stored in the mixer model
    #[arg(long = "pif-in", allow_negative_numbers = true)]
    pub pif_in: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BreakdownArgs {
    #[command(flatten)]
    pub models: ChainModelArgs,
    /// Frequencies (GHz), comma separated
    #[arg(long, value_delimiter = ',')]
    pub freqs: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub models: ChainModelArgs,
    /// Grid start (GHz); defaults to the lowest model domain edge
    #[arg(long)]
    pub from: Option<f64>,
    /// Grid end (GHz); defaults to the highest model domain edge
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Evaluate grid points outside every model's domain
    #[arg(long = "allow-extrapolation")]
    pub allow_extrapolation: bool,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Feature columns, comma separated
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    #[arg(long)]
    pub tech: Option<String>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Breakdown CSV to draw as stacked bars
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub breakdown: Option<PathBuf>,
    /// Model JSON to draw as a curve
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(&a, out, err),
        Command::Query(a) => cmd_query(&a, out),
        Command::Breakdown(a) => cmd_breakdown(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Corr(a) => cmd_corr(&a, out, err),
        Command::Plot(a) => cmd_plot(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn warn_rejected(err: &mut dyn Write, rejected: &[CellIssue]) {
    for issue in rejected {
        let _ = writeln!(err, "warning: skipped row {issue}");
    }
}

fn prepare<E: SurveyRecord>(
    ds: Dataset<E>,
    tech: Option<&str>,
    err: &mut dyn Write,
) -> Result<Dataset<E>, CliError> {
    warn_rejected(err, ds.rejected());
    match tech {
        None => Ok(ds),
        Some(t) => ds
            .filter_technology(t)
            .ok_or_else(|| CliError::Data(format!("no rows match technology `{t}`"))),
    }
}

fn fit_options(bins: usize, weight: f64) -> Result<FitOptions, CliError> {
    if bins == 0 {
        return Err(usage("--bins must be at least 1"));
    }
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(usage("--bp-weight must be positive"));
    }
    Ok(FitOptions {
        bins,
        best_point_weight: weight,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let opts = fit_options(a.bins, a.bp_weight)?;
    let tech = a.tech.as_deref();
    let (model, report): (ComponentModel, FitReport) = match a.component {
        ComponentArg::Pa => {
            let ds = prepare(load_pa_csv(&a.input).map_err(data)?, tech, err)?;
            let (m, r) = build_pa_model(&ds, &opts).map_err(data)?;
            (ComponentModel::Pa(m), r)
        }
        ComponentArg::Osc => {
            let ds = prepare(load_osc_csv(&a.input).map_err(data)?, tech, err)?;
            let (m, r) = build_osc_model(&ds, &opts).map_err(data)?;
            (ComponentModel::Osc(m), r)
        }
        ComponentArg::Mixer => {
            let pif = PowerDbm::new(a.pif_in).map_err(|e| usage(format!("--pif-in: {e}")))?;
            let ds = prepare(load_mixer_csv(&a.input).map_err(data)?, tech, err)?;
            let (m, r) = build_mixer_model(&ds, &opts, pif).map_err(data)?;
            (ComponentModel::Mixer(m), r)
        }
    };
    let file = model.to_file(&report);
    let json = serde_json::to_string_pretty(&file).map_err(data)?;
    write_file(&a.output, format!("{json}\n").as_bytes())?;

    let mut text = format!(
        "component: {}\nn = {}\nn_best_points = {}\nrmse = {}\nr2 = {}\n",
        file.component.name(),
        report.n_points,
        report.n_best_points,
        report.rmse,
        report.r_squared
    );
    match model.curve() {
        Curve::Exponential(c) => text.push_str(&format!("a = {}\nb = {} /GHz\n", c.a, c.b)),
        Curve::ParabExp(c) => text.push_str(&format!(
            "knot = {} GHz\npeak = {}\nb = {} /GHz\n",
            c.knot.value(),
            c.parabola_at(c.knot.value()),
            c.b
        )),
    }
    let d = model.curve().domain();
    text.push_str(&format!("domain = [{}, {}] GHz\n", d.lo(), d.hi()));
    out.write_all(text.as_bytes()).map_err(data)
}

fn load_model(path: &Path) -> Result<ComponentModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| data(format!("{}: invalid model file: {e}", path.display())))?;
    ComponentModel::from_file(&file).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn dbm_flag(v: Option<f64>, flag: &str, kind: &str) -> Result<PowerDbm, CliError> {
    let v = v.ok_or_else(|| usage(format!("a {kind} query needs --{flag}")))?;
    PowerDbm::new(v).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn cmd_query(a: &QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let f = FrequencyGhz::new(a.freq).map_err(|e| usage(format!("--freq: {e}")))?;
    let model = load_model(&a.model)?;
    let (q, figure_name) = match model {
        ComponentModel::Pa(m) => {
            let p_out = dbm_flag(a.p_out, "p-out", "pa")?;
            let p_in = dbm_flag(a.p_in, "p-in", "pa")?;
            (m.pa_pdc(f, p_out, p_in).map_err(data)?, "PAE")
        }
        ComponentModel::Osc(m) => {
            let p_rf = dbm_flag(a.p_rf, "p-rf", "osc")?;
            (m.osc_pdc(f, p_rf).map_err(data)?, "efficiency")
        }
        ComponentModel::Mixer(m) => {
            let p = dbm_flag(a.p_rf_out, "p-rf-out", "mixer")?;
            (m.mixer_pdc(f, p).map_err(data)?, "eta_mix")
        }
    };
    let marker = if q.extrapolated { " extrapolated" } else { "" };
    writeln!(
        out,
        "P_DC = {:.4} mW  {figure_name} = {:.6}{marker}",
        q.pdc.value(),
        q.figure
    )
    .map_err(data)
}

struct LoadedChain {
    pa: crate::components::PaPowerModel,
    mixer: crate::components::MixerPowerModel,
    osc: crate::components::OscPowerModel,
}

fn load_chain(a: &ChainModelArgs) -> Result<LoadedChain, CliError> {
    let wrong =
        |p: &Path, e: crate::components::ComponentError| data(format!("{}: {e}", p.display()));
    Ok(LoadedChain {
        pa: load_model(&a.pa)?.into_pa().map_err(|e| wrong(&a.pa, e))?,
        mixer: load_model(&a.mixer)?
            .into_mixer()
            .map_err(|e| wrong(&a.mixer, e))?,
        osc: load_model(&a.osc)?
            .into_osc()
            .map_err(|e| wrong(&a.osc, e))?,
    })
}

fn chain_config(
    a: &ChainModelArgs,
    chain: &LoadedChain,
    freqs: Option<&[f64]>,
) -> Result<ChainConfig, CliError> {
    let dbm = |v: f64, flag: &str| PowerDbm::new(v).map_err(|e| usage(format!("--{flag}: {e}")));
    let mut cfg = ChainConfig {
        pa_pout: dbm(a.pa_pout, "pa-pout")?,
        osc_prf: dbm(a.osc_prf, "osc-prf")?,
        mixer_pif_in: match a.pif_in {
            Some(v) => dbm(v, "pif-in")?,
            None => chain.mixer.pif_in,
        },
        ..ChainConfig::default()
    };
    if !a.mixer_pout.is_empty() {
        cfg.mixer_pout_levels = a
            .mixer_pout
            .iter()
            .map(|&v| dbm(v, "mixer-pout"))
            .collect::<Result<_, _>>()?;
    }
    if let Some(fs) = freqs {
        cfg.frequencies = fs
            .iter()
            .map(|&f| FrequencyGhz::new(f).map_err(|e| usage(format!("--freqs: {e}"))))
            .collect::<Result<_, _>>()?;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn emit_table(
    cells: &[CellResult],
    a: &ChainModelArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let bytes = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            chain::write_csv(cells, &mut buf).map_err(data)?;
            buf
        }
        Format::Json => {
            let mut s = chain::to_json(cells).map_err(data)?;
            s.push('\n');
            s.into_bytes()
        }
    };
    match &a.output {
        Some(p) => write_file(p, &bytes)?,
        None => out.write_all(&bytes).map_err(data)?,
    }
    let failed: Vec<_> = cells.iter().filter_map(|c| c.as_ref().err()).collect();
    for e in &failed {
        let _ = writeln!(err, "cell failed: {e}");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{} of {} cells failed",
            failed.len(),
            cells.len()
        )))
    }
}

fn cmd_breakdown(
    a: &BreakdownArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let chain = load_chain(&a.models)?;
    let freqs = (!a.freqs.is_empty()).then_some(a.freqs.as_slice());
    let cfg = chain_config(&a.models, &chain, freqs)?;
    let cells = chain::compose(&cfg, &chain.pa, &chain.mixer, &chain.osc).map_err(usage)?;
    emit_table(&cells, &a.models, out, err)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let chain = load_chain(&a.models)?;
    let domains = [
        chain.pa.pae_curve.domain(),
        chain.mixer.eff_curve.domain(),
        chain.osc.eff_curve.domain(),
    ];
    let lo = a
        .from
        .unwrap_or_else(|| domains.iter().map(|d| d.lo()).fold(f64::INFINITY, f64::min));
    let hi = a.to.unwrap_or_else(|| {
        domains
            .iter()
            .map(|d| d.hi())
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let grid = chain::linear_grid(lo, hi, a.points).map_err(usage)?;
    let mut cfg = chain_config(&a.models, &chain, None)?;
    cfg.frequencies = grid;
    let cells = chain::sweep(
        &cfg,
        &chain.pa,
        &chain.mixer,
        &chain.osc,
        a.allow_extrapolation,
    )
    .map_err(usage)?;
    emit_table(&cells, &a.models, out, err)
}

fn cmd_corr(a: &CorrArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let ds = prepare(load_pa_csv(&a.input).map_err(data)?, a.tech.as_deref(), err)?;
    let names: Vec<&str> = if a.features.is_empty() {
        PA_CORRELATION_FEATURES.to_vec()
    } else {
        a.features.iter().map(String::as_str).collect()
    };
    let m = correlation_matrix(&ds, &names).map_err(data)?;
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(6);
    let mut text = format!("{:width$}", "");
    for n in &names {
        text.push_str(&format!(" {n:>width$}"));
    }
    text.push('\n');
    for (n, row) in names.iter().zip(&m) {
        text.push_str(&format!("{n:width$}"));
        for v in row {
            text.push_str(&format!(" {v:>width$.2}"));
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(data)
}

fn cmd_plot(a: &PlotArgs) -> Result<(), CliError> {
    let svg = match (&a.breakdown, &a.model) {
        (Some(p), _) => {
            let f =
                fs::File::open(p).map_err(|e| data(format!("cannot read {}: {e}", p.display())))?;
            let rows = chain::read_csv(f).map_err(|e| data(format!("{}: {e}", p.display())))?;
            plot::breakdown_svg(&rows)
        }
        (None, Some(p)) => {
            let text = fs::read_to_string(p)
                .map_err(|e| data(format!("cannot read {}: {e}", p.display())))?;
            let file: ModelFile = serde_json::from_str(&text)
                .map_err(|e| data(format!("{}: invalid model file: {e}", p.display())))?;
            plot::model_svg(&file)
        }
        (None, None) => return Err(usage("give --breakdown or --model")),
    };
    write_file(&a.output, svg.as_bytes())
}
