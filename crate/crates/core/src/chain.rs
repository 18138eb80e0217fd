//! Transmitter-chain composition: PA + mixer + oscillator DC power at each
//! (frequency, mixer output level) cell.
//!
//! The mixer output drives the PA input, so the PA is asked for
//! `pa_pout` from `mixer_pout`; when the two are equal the PA is bypassed
//! and draws nothing. The oscillator runs at a fixed RF output.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{
    ComponentError, ComponentKind, MixerPowerModel, OscPowerModel, PaPowerModel, PowerQuery,
};
use crate::regression::{Domain, FrequencyCurve};
use crate::units::{FrequencyGhz, PowerDbm, PowerMw};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("no frequencies to evaluate")]
    EmptyGrid,
    #[error("no mixer output levels to evaluate")]
    NoLevels,
    #[error("frequencies must be strictly increasing ({0} GHz follows {1} GHz)")]
    Unsorted(f64, f64),
    #[error("mixer output {mixer} dBm exceeds PA output {pa} dBm")]
    MixerAbovePa { mixer: f64, pa: f64 },
    #[error("mixer output {mixer} dBm is below the IF input {pif} dBm")]
    MixerBelowIf { mixer: f64, pif: f64 },
    #[error(
        "{f} GHz lies outside the combined model span [{lo}, {hi}] GHz; \
         allow extrapolation to evaluate it"
    )]
    OutsideModels { f: f64, lo: f64, hi: f64 },
    #[error("grid needs at least 2 points between distinct limits")]
    BadGrid,
}

/// Anything that can stand in for the PA in the chain.
pub trait PaStage {
    fn pa_pdc(
        &self,
        f: FrequencyGhz,
        p_out: PowerDbm,
        p_in: PowerDbm,
    ) -> Result<PowerQuery, ComponentError>;
    fn domain(&self) -> Option<Domain> {
        None
    }
}

pub trait MixerStage {
    fn mixer_pdc(
        &self,
        f: FrequencyGhz,
        p_rf_out: PowerDbm,
        p_if_in: PowerDbm,
    ) -> Result<PowerQuery, ComponentError>;
    fn domain(&self) -> Option<Domain> {
        None
    }
}

pub trait OscStage {
    fn osc_pdc(&self, f: FrequencyGhz, p_rf: PowerDbm) -> Result<PowerQuery, ComponentError>;
    fn domain(&self) -> Option<Domain> {
        None
    }
}

impl PaStage for PaPowerModel {
    fn pa_pdc(
        &self,
        f: FrequencyGhz,
        p_out: PowerDbm,
        p_in: PowerDbm,
    ) -> Result<PowerQuery, ComponentError> {
        PaPowerModel::pa_pdc(self, f, p_out, p_in)
    }
    fn domain(&self) -> Option<Domain> {
        Some(self.pae_curve.domain())
    }
}

impl MixerStage for MixerPowerModel {
    fn mixer_pdc(
        &self,
        f: FrequencyGhz,
        p_rf_out: PowerDbm,
        p_if_in: PowerDbm,
    ) -> Result<PowerQuery, ComponentError> {
        let m = MixerPowerModel {
            pif_in: p_if_in,
            ..*self
        };
        MixerPowerModel::mixer_pdc(&m, f, p_rf_out)
    }
    fn domain(&self) -> Option<Domain> {
        Some(self.eff_curve.domain())
    }
}

impl OscStage for OscPowerModel {
    fn osc_pdc(&self, f: FrequencyGhz, p_rf: PowerDbm) -> Result<PowerQuery, ComponentError> {
        OscPowerModel::osc_pdc(self, f, p_rf)
    }
    fn domain(&self) -> Option<Domain> {
        Some(self.eff_curve.domain())
    }
}

/// Default evaluation frequencies in GHz.
pub const DEFAULT_FREQUENCIES_GHZ: [f64; 4] = [28.0, 60.0, 140.0, 243.0];
/// Default mixer output levels in dBm.
pub const DEFAULT_MIXER_LEVELS_DBM: [f64; 4] = [-20.0, -10.0, -5.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub frequencies: Vec<FrequencyGhz>,
    pub pa_pout: PowerDbm,
    pub osc_prf: PowerDbm,
    pub mixer_pout_levels: Vec<PowerDbm>,
    pub mixer_pif_in: PowerDbm,
}

fn dbm(v: f64) -> PowerDbm {
    PowerDbm::new(v).expect("finite constant")
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            frequencies: DEFAULT_FREQUENCIES_GHZ
                .iter()
                .map(|&f| FrequencyGhz::new(f).expect("positive constant"))
                .collect(),
            pa_pout: dbm(0.0),
            osc_prf: dbm(-10.0),
            mixer_pout_levels: DEFAULT_MIXER_LEVELS_DBM.iter().map(|&p| dbm(p)).collect(),
            mixer_pif_in: dbm(crate::components::DEFAULT_MIXER_PIF_IN_DBM),
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), ChainError> {
        if self.frequencies.is_empty() {
            return Err(ChainError::EmptyGrid);
        }
        if self.mixer_pout_levels.is_empty() {
            return Err(ChainError::NoLevels);
        }
        for w in self.frequencies.windows(2) {
            if w[1].value() <= w[0].value() {
                return Err(ChainError::Unsorted(w[1].value(), w[0].value()));
            }
        }
        for level in &self.mixer_pout_levels {
            if level.value() > self.pa_pout.value() {
                return Err(ChainError::MixerAbovePa {
                    mixer: level.value(),
                    pa: self.pa_pout.value(),
                });
            }
            if level.value() < self.mixer_pif_in.value() {
                return Err(ChainError::MixerBelowIf {
                    mixer: level.value(),
                    pif: self.mixer_pif_in.value(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shares {
    pub pa: f64,
    pub mixer: f64,
    pub osc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtrapolationFlags {
    pub pa: bool,
    pub mixer: bool,
    pub osc: bool,
}

impl ExtrapolationFlags {
    pub fn any(&self) -> bool {
        self.pa || self.mixer || self.osc
    }

    /// `;`-separated names of the flagged components, empty if none.
    pub fn label(&self) -> String {
        [(self.pa, "pa"), (self.mixer, "mixer"), (self.osc, "osc")]
            .iter()
            .filter(|(set, _)| *set)
            .map(|(_, n)| *n)
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// DC power split of the chain at one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBreakdown {
    pub f: FrequencyGhz,
    pub mixer_pout: PowerDbm,
    pub pa_pdc: PowerMw,
    pub mixer_pdc: PowerMw,
    pub osc_pdc: PowerMw,
    pub total_pdc: PowerMw,
    pub shares: Shares,
    pub extrapolated: ExtrapolationFlags,
}

/// A cell that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{f}, mixer output {mixer_pout}: {} model: {source}", .component.name())]
pub struct CellError {
    pub f: FrequencyGhz,
    pub mixer_pout: PowerDbm,
    pub component: ComponentKind,
    #[source]
    pub source: ComponentError,
}

pub type CellResult = Result<ChainBreakdown, CellError>;

fn breakdown_cell(
    config: &ChainConfig,
    f: FrequencyGhz,
    level: PowerDbm,
    pa: &dyn PaStage,
    mixer: &dyn MixerStage,
    osc: &dyn OscStage,
) -> CellResult {
    let fail = |component, source| CellError {
        f,
        mixer_pout: level,
        component,
        source,
    };
    let pa_q = pa
        .pa_pdc(f, config.pa_pout, level)
        .map_err(|e| fail(ComponentKind::Pa, e))?;
    let mixer_q = mixer
        .mixer_pdc(f, level, config.mixer_pif_in)
        .map_err(|e| fail(ComponentKind::Mixer, e))?;
    let osc_q = osc
        .osc_pdc(f, config.osc_prf)
        .map_err(|e| fail(ComponentKind::Osc, e))?;

    let pa_pdc = if level == config.pa_pout {
        0.0
    } else {
        pa_q.pdc.value()
    };
    let mixer_pdc = mixer_q.pdc.value();
    let osc_pdc = osc_q.pdc.value();
    let total = pa_pdc + mixer_pdc + osc_pdc;
    let shares = if total > 0.0 {
        Shares {
            pa: pa_pdc / total,
            mixer: mixer_pdc / total,
            osc: osc_pdc / total,
        }
    } else {
        Shares::default()
    };
    let mw = |v: f64| PowerMw::new(v).expect("stage powers are non-negative");
    Ok(ChainBreakdown {
        f,
        mixer_pout: level,
        pa_pdc: mw(pa_pdc),
        mixer_pdc: mw(mixer_pdc),
        osc_pdc: mw(osc_pdc),
        total_pdc: mw(total),
        shares,
        extrapolated: ExtrapolationFlags {
            pa: pa_q.extrapolated,
            mixer: mixer_q.extrapolated,
            osc: osc_q.extrapolated,
        },
    })
}

/// One result per (frequency, mixer level), frequency-major. A failing cell
/// does not stop the others.
pub fn compose(
    config: &ChainConfig,
    pa: &dyn PaStage,
    mixer: &dyn MixerStage,
    osc: &dyn OscStage,
) -> Result<Vec<CellResult>, ChainError> {
    config.validate()?;
    Ok(config
        .frequencies
        .iter()
        .flat_map(|&f| {
            config
                .mixer_pout_levels
                .iter()
                .map(move |&level| (f, level))
        })
        .map(|(f, level)| breakdown_cell(config, f, level, pa, mixer, osc))
        .collect())
}

/// `n` evenly spaced frequencies from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<FrequencyGhz>, ChainError> {
    if n == 1 && lo == hi {
        return FrequencyGhz::new(lo)
            .map(|f| vec![f])
            .map_err(|_| ChainError::BadGrid);
    }
    if n < 2 || !(lo < hi) {
        return Err(ChainError::BadGrid);
    }
    (0..n)
        .map(|i| {
            let f = if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            FrequencyGhz::new(f).map_err(|_| ChainError::BadGrid)
        })
        .collect()
}

/// [`compose`] over a dense grid. Unless `allow_extrapolation`, every grid
/// frequency must lie within the union span of the model domains.
pub fn sweep(
    config: &ChainConfig,
    pa: &dyn PaStage,
    mixer: &dyn MixerStage,
    osc: &dyn OscStage,
    allow_extrapolation: bool,
) -> Result<Vec<CellResult>, ChainError> {
    if config.frequencies.is_empty() {
        return Err(ChainError::EmptyGrid);
    }
    if !allow_extrapolation {
        let domains = [pa.domain(), mixer.domain(), osc.domain()];
        let known: Vec<Domain> = domains.into_iter().flatten().collect();
        if !known.is_empty() {
            let lo = known.iter().map(Domain::lo).fold(f64::INFINITY, f64::min);
            let hi = known
                .iter()
                .map(Domain::hi)
                .fold(f64::NEG_INFINITY, f64::max);
            if let Some(f) = config
                .frequencies
                .iter()
                .find(|f| f.value() < lo || f.value() > hi)
            {
                return Err(ChainError::OutsideModels {
                    f: f.value(),
                    lo,
                    hi,
                });
            }
        }
    }
    compose(config, pa, mixer, osc)
}

pub const CSV_HEADER: [&str; 10] = [
    "freq_ghz",
    "mixer_pout_dbm",
    "pa_pdc_mw",
    "mixer_pdc_mw",
    "osc_pdc_mw",
    "total_pdc_mw",
    "pa_share",
    "mixer_share",
    "osc_share",
    "extrapolated_components",
];

/// Flat row of a breakdown table, as written to CSV and JSON. Failed cells
/// have no numbers and carry the failure in `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRecord {
    pub freq_ghz: f64,
    pub mixer_pout_dbm: f64,
    pub pa_pdc_mw: Option<f64>,
    pub mixer_pdc_mw: Option<f64>,
    pub osc_pdc_mw: Option<f64>,
    pub total_pdc_mw: Option<f64>,
    pub pa_share: Option<f64>,
    pub mixer_share: Option<f64>,
    pub osc_share: Option<f64>,
    pub extrapolated_components: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

const ERROR_PREFIX: &str = "error: ";

impl From<&CellResult> for BreakdownRecord {
    fn from(cell: &CellResult) -> Self {
        match cell {
            Ok(b) => Self {
                freq_ghz: b.f.value(),
                mixer_pout_dbm: b.mixer_pout.value(),
                pa_pdc_mw: Some(b.pa_pdc.value()),
                mixer_pdc_mw: Some(b.mixer_pdc.value()),
                osc_pdc_mw: Some(b.osc_pdc.value()),
                total_pdc_mw: Some(b.total_pdc.value()),
                pa_share: Some(b.shares.pa),
                mixer_share: Some(b.shares.mixer),
                osc_share: Some(b.shares.osc),
                extrapolated_components: b.extrapolated.label(),
                error: None,
            },
            Err(e) => Self {
                freq_ghz: e.f.value(),
                mixer_pout_dbm: e.mixer_pout.value(),
                pa_pdc_mw: None,
                mixer_pdc_mw: None,
                osc_pdc_mw: None,
                total_pdc_mw: None,
                pa_share: None,
                mixer_share: None,
                osc_share: None,
                extrapolated_components: String::new(),
                error: Some(e.to_string()),
            },
        }
    }
}

fn cell_text(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the table as CSV. A failed cell keeps its coordinates, leaves the
/// numeric columns empty and puts `error: <message>` in the last column.
pub fn write_csv<W: Write>(cells: &[CellResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for cell in cells {
        let r = BreakdownRecord::from(cell);
        let last = match &r.error {
            Some(e) => format!("{ERROR_PREFIX}{e}"),
            None => r.extrapolated_components.clone(),
        };
        w.write_record([
            r.freq_ghz.to_string(),
            r.mixer_pout_dbm.to_string(),
            cell_text(r.pa_pdc_mw),
            cell_text(r.mixer_pdc_mw),
            cell_text(r.osc_pdc_mw),
            cell_text(r.total_pdc_mw),
            cell_text(r.pa_share),
            cell_text(r.mixer_share),
            cell_text(r.osc_share),
            last,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(cells: &[CellResult]) -> serde_json::Result<String> {
    let records: Vec<BreakdownRecord> = cells.iter().map(BreakdownRecord::from).collect();
    serde_json::to_string_pretty(&records)
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("header must be `{}`", CSV_HEADER.join(","))]
    Header,
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    Cell {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Reads a table written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BreakdownRecord>, TableError> {
    let mut rdr = csv::Reader::from_reader(input);
    if rdr.headers()?.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(TableError::Header);
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let num = |idx: usize| -> Result<Option<f64>, TableError> {
            let v = rec.get(idx).unwrap_or("").trim();
            if v.is_empty() {
                return Ok(None);
            }
            v.parse::<f64>().map(Some).map_err(|_| TableError::Cell {
                row,
                column: CSV_HEADER[idx],
                value: v.to_string(),
            })
        };
        let required = |idx: usize| -> Result<f64, TableError> {
            num(idx)?.ok_or_else(|| TableError::Cell {
                row,
                column: CSV_HEADER[idx],
                value: String::new(),
            })
        };
        let last = rec.get(9).unwrap_or("").to_string();
        let (extrapolated_components, error) = match last.strip_prefix(ERROR_PREFIX) {
            Some(e) => (String::new(), Some(e.to_string())),
            None => (last, None),
        };
        out.push(BreakdownRecord {
            freq_ghz: required(0)?,
            mixer_pout_dbm: required(1)?,
            pa_pdc_mw: num(2)?,
            mixer_pdc_mw: num(3)?,
            osc_pdc_mw: num(4)?,
            total_pdc_mw: num(5)?,
            pa_share: num(6)?,
            mixer_share: num(7)?,
            osc_share: num(8)?,
            extrapolated_components,
            error,
        });
    }
    Ok(out)
}
