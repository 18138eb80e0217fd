//! Survey datasets: CSV schemas, loading with row-level validation, and
//! descriptive statistics (summary and Pearson correlation matrix).

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use thiserror::Error;

use crate::units::{FrequencyGhz, PowerDbm, PowerMw};

/// One problem found in one CSV cell. `row` is the 1-based line number in
/// the file (the header is line 1); `column` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CellIssue {
    pub row: usize,
    pub column: usize,
    pub column_name: &'static str,
    pub message: String,
}

impl fmt::Display for CellIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} ({}): {}",
            self.row, self.column, self.column_name, self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed header: expected `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}:{issue}")]
    Cell { path: PathBuf, issue: CellIssue },
    #[error("{path}: CSV error: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: zero valid rows{}", render_rejections(.rejected))]
    NoValidRows {
        path: PathBuf,
        rejected: Vec<CellIssue>,
    },
}

fn render_rejections(rejected: &[CellIssue]) -> String {
    rejected
        .iter()
        .map(|r| format!("\n  rejected {r}"))
        .collect()
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least 3 usable rows for `{0}` vs `{1}`, found {2}")]
    TooFewRows(String, String, usize),
    #[error("feature `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("dataset is empty")]
    Empty,
}

/// A row-level parse failure. `Fatal` aborts the load (unparsable or missing
/// mandatory cell); `Rejected` drops the row and keeps going (the values
/// parse but violate a record invariant).
#[derive(Debug)]
pub enum RowError {
    Fatal(CellIssue),
    Rejected(CellIssue),
}

/// A survey record type with a fixed CSV schema.
pub trait SurveyRecord: Sized + Clone {
    const COLUMNS: &'static [&'static str];
    /// Numeric features usable in statistics, by column name.
    const FEATURES: &'static [&'static str];

    fn parse_row(cells: &RowCells<'_>) -> Result<Self, RowError>;
    fn to_cells(&self) -> Vec<String>;
    fn feature(&self, name: &str) -> Option<f64>;
    fn frequency(&self) -> FrequencyGhz;
    fn technology(&self) -> Option<&str>;
}

/// Cell accessor handed to [`SurveyRecord::parse_row`].
pub struct RowCells<'a> {
    row: usize,
    columns: &'static [&'static str],
    record: &'a csv::StringRecord,
}

impl<'a> RowCells<'a> {
    fn position(&self, name: &'static str) -> usize {
        self.columns
            .iter()
            .position(|c| *c == name)
            .expect("column belongs to schema")
    }

    fn issue(&self, name: &'static str, message: String) -> CellIssue {
        CellIssue {
            row: self.row,
            column: self.position(name) + 1,
            column_name: name,
            message,
        }
    }

    pub fn fatal(&self, name: &'static str, message: impl Into<String>) -> RowError {
        RowError::Fatal(self.issue(name, message.into()))
    }

    pub fn reject(&self, name: &'static str, message: impl Into<String>) -> RowError {
        RowError::Rejected(self.issue(name, message.into()))
    }

    pub fn raw(&self, name: &'static str) -> &str {
        self.record.get(self.position(name)).unwrap_or("").trim()
    }

    pub fn text(&self, name: &'static str) -> Option<String> {
        let v = self.raw(name);
        (!v.is_empty()).then(|| v.to_string())
    }

    pub fn optional_number(&self, name: &'static str) -> Result<Option<f64>, RowError> {
        let v = self.raw(name);
        if v.is_empty() {
            return Ok(None);
        }
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(self.fatal(name, format!("cannot parse `{v}` as a number"))),
        }
    }

    pub fn number(&self, name: &'static str) -> Result<f64, RowError> {
        self.optional_number(name)?
            .ok_or_else(|| self.fatal(name, "missing mandatory value"))
    }

    pub fn frequency(&self, name: &'static str) -> Result<FrequencyGhz, RowError> {
        let v = self.number(name)?;
        FrequencyGhz::new(v).map_err(|e| self.reject(name, e.to_string()))
    }

    pub fn power_mw(&self, name: &'static str) -> Result<PowerMw, RowError> {
        let v = self.number(name)?;
        if v <= 0.0 {
            return Err(self.reject(name, format!("DC power must be positive, got {v}")));
        }
        PowerMw::new(v).map_err(|e| self.reject(name, e.to_string()))
    }

    pub fn power_dbm(&self, name: &'static str) -> Result<PowerDbm, RowError> {
        let v = self.number(name)?;
        PowerDbm::new(v).map_err(|e| self.reject(name, e.to_string()))
    }
}

fn opt_text(v: &Option<String>) -> String {
    v.clone().unwrap_or_default()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Power amplifier survey entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PaSurveyEntry {
    pub freq: FrequencyGhz,
    /// Saturated output power.
    pub psat: PowerDbm,
    /// Power-added efficiency in percent, (0, 100].
    pub pae: f64,
    pub gain: f64,
    pub area: Option<f64>,
    pub technology: Option<String>,
    pub source: Option<String>,
}

impl SurveyRecord for PaSurveyEntry {
    const COLUMNS: &'static [&'static str] = &[
        "freq_ghz",
        "psat_dbm",
        "pae_pct",
        "gain_db",
        "area_mm2",
        "technology",
        "source",
    ];
    const FEATURES: &'static [&'static str] =
        &["freq_ghz", "psat_dbm", "pae_pct", "gain_db", "area_mm2"];

    fn parse_row(c: &RowCells<'_>) -> Result<Self, RowError> {
        let freq = c.frequency("freq_ghz")?;
        let psat = c.power_dbm("psat_dbm")?;
        let pae = c.number("pae_pct")?;
        let gain = c.number("gain_db")?;
        let area = c.optional_number("area_mm2")?;
        if !(pae > 0.0 && pae <= 100.0) {
            return Err(c.reject("pae_pct", format!("PAE must lie in (0, 100] %, got {pae}")));
        }
        if let Some(a) = area {
            if a <= 0.0 {
                return Err(c.reject("area_mm2", format!("area must be positive, got {a}")));
            }
        }
        Ok(Self {
            freq,
            psat,
            pae,
            gain,
            area,
            technology: c.text("technology"),
            source: c.text("source"),
        })
    }

    fn to_cells(&self) -> Vec<String> {
        vec![
            self.freq.value().to_string(),
            self.psat.value().to_string(),
            self.pae.to_string(),
            self.gain.to_string(),
            opt_num(self.area),
            opt_text(&self.technology),
            opt_text(&self.source),
        ]
    }

    fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "freq_ghz" => Some(self.freq.value()),
            "psat_dbm" => Some(self.psat.value()),
            "pae_pct" => Some(self.pae),
            "gain_db" => Some(self.gain),
            "area_mm2" => self.area,
            _ => None,
        }
    }

    fn frequency(&self) -> FrequencyGhz {
        self.freq
    }

    fn technology(&self) -> Option<&str> {
        self.technology.as_deref()
    }
}

/// Oscillator survey entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OscSurveyEntry {
    pub freq: FrequencyGhz,
    pub pdc: PowerMw,
    pub pout: PowerDbm,
    /// Phase noise in dBc/Hz at `offset`.
    pub phase_noise: f64,
    /// Offset frequency in MHz.
    pub offset: f64,
    pub technology: Option<String>,
    pub source: Option<String>,
}

impl SurveyRecord for OscSurveyEntry {
    const COLUMNS: &'static [&'static str] = &[
        "freq_ghz",
        "pdc_mw",
        "pout_dbm",
        "pn_dbc_hz",
        "offset_mhz",
        "technology",
        "source",
    ];
    const FEATURES: &'static [&'static str] =
        &["freq_ghz", "pdc_mw", "pout_dbm", "pn_dbc_hz", "offset_mhz"];

    fn parse_row(c: &RowCells<'_>) -> Result<Self, RowError> {
        let freq = c.frequency("freq_ghz")?;
        let pdc = c.power_mw("pdc_mw")?;
        let pout = c.power_dbm("pout_dbm")?;
        let phase_noise = c.number("pn_dbc_hz")?;
        let offset = c.number("offset_mhz")?;
        if phase_noise >= 0.0 {
            return Err(c.reject(
                "pn_dbc_hz",
                format!("phase noise must be negative, got {phase_noise}"),
            ));
        }
        if offset <= 0.0 {
            return Err(c.reject(
                "offset_mhz",
                format!("offset must be positive, got {offset}"),
            ));
        }
        Ok(Self {
            freq,
            pdc,
            pout,
            phase_noise,
            offset,
            technology: c.text("technology"),
            source: c.text("source"),
        })
    }

    fn to_cells(&self) -> Vec<String> {
        vec![
            self.freq.value().to_string(),
            self.pdc.value().to_string(),
            self.pout.value().to_string(),
            self.phase_noise.to_string(),
            self.offset.to_string(),
            opt_text(&self.technology),
            opt_text(&self.source),
        ]
    }

    fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "freq_ghz" => Some(self.freq.value()),
            "pdc_mw" => Some(self.pdc.value()),
            "pout_dbm" => Some(self.pout.value()),
            "pn_dbc_hz" => Some(self.phase_noise),
            "offset_mhz" => Some(self.offset),
            _ => None,
        }
    }

    fn frequency(&self) -> FrequencyGhz {
        self.freq
    }

    fn technology(&self) -> Option<&str> {
        self.technology.as_deref()
    }
}

/// Mixer survey entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MixerSurveyEntry {
    pub freq: FrequencyGhz,
    pub pdc: PowerMw,
    /// Conversion gain in dB.
    pub cg: f64,
    pub technology: Option<String>,
    pub source: Option<String>,
}

impl SurveyRecord for MixerSurveyEntry {
    const COLUMNS: &'static [&'static str] =
        &["freq_ghz", "pdc_mw", "cg_db", "technology", "source"];
    const FEATURES: &'static [&'static str] = &["freq_ghz", "pdc_mw", "cg_db"];

    fn parse_row(c: &RowCells<'_>) -> Result<Self, RowError> {
        Ok(Self {
            freq: c.frequency("freq_ghz")?,
            pdc: c.power_mw("pdc_mw")?,
            cg: c.number("cg_db")?,
            technology: c.text("technology"),
            source: c.text("source"),
        })
    }

    fn to_cells(&self) -> Vec<String> {
        vec![
            self.freq.value().to_string(),
            self.pdc.value().to_string(),
            self.cg.to_string(),
            opt_text(&self.technology),
            opt_text(&self.source),
        ]
    }

    fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "freq_ghz" => Some(self.freq.value()),
            "pdc_mw" => Some(self.pdc.value()),
            "cg_db" => Some(self.cg),
            _ => None,
        }
    }

    fn frequency(&self) -> FrequencyGhz {
        self.freq
    }

    fn technology(&self) -> Option<&str> {
        self.technology.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub path: PathBuf,
    pub loaded_at: SystemTime,
}

/// A validated, non-empty, immutable list of survey entries.
#[derive(Debug, Clone)]
pub struct Dataset<E> {
    entries: Vec<E>,
    provenance: Provenance,
    rejected: Vec<CellIssue>,
}

impl<E: SurveyRecord> Dataset<E> {
    /// Build a dataset from in-memory entries.
    pub fn from_entries(entries: Vec<E>, label: impl Into<PathBuf>) -> Option<Self> {
        (!entries.is_empty()).then(|| Self {
            entries,
            provenance: Provenance {
                path: label.into(),
                loaded_at: SystemTime::now(),
            },
            rejected: Vec::new(),
        })
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Rows dropped during load because they violated a record invariant.
    pub fn rejected(&self) -> &[CellIssue] {
        &self.rejected
    }

    /// Keep entries whose technology label contains `needle`
    /// (case-insensitive). `None` when nothing matches.
    pub fn filter_technology(&self, needle: &str) -> Option<Self> {
        let needle = needle.to_lowercase();
        let entries: Vec<E> = self
            .entries
            .iter()
            .filter(|e| {
                e.technology()
                    .is_some_and(|t| t.to_lowercase().contains(&needle))
            })
            .cloned()
            .collect();
        (!entries.is_empty()).then(|| Self {
            entries,
            provenance: self.provenance.clone(),
            rejected: Vec::new(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(E::COLUMNS)?;
        for e in &self.entries {
            w.write_record(e.to_cells())?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn load_csv<E: SurveyRecord>(path: impl AsRef<Path>) -> Result<Dataset<E>, DatasetError> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_csv(&text, path)
}

pub fn load_pa_csv(path: impl AsRef<Path>) -> Result<Dataset<PaSurveyEntry>, DatasetError> {
    load_csv(path)
}

pub fn load_osc_csv(path: impl AsRef<Path>) -> Result<Dataset<OscSurveyEntry>, DatasetError> {
    load_csv(path)
}

pub fn load_mixer_csv(path: impl AsRef<Path>) -> Result<Dataset<MixerSurveyEntry>, DatasetError> {
    load_csv(path)
}

/// Parse CSV text; `label` is used for diagnostics and provenance.
pub fn parse_csv<E: SurveyRecord>(text: &str, label: &Path) -> Result<Dataset<E>, DatasetError> {
    let no_rows = |rejected| DatasetError::NoValidRows {
        path: label.to_path_buf(),
        rejected,
    };
    if text.trim().is_empty() {
        return Err(no_rows(Vec::new()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| DatasetError::Csv {
        path: label.to_path_buf(),
        message: e.to_string(),
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != E::COLUMNS {
        return Err(DatasetError::Header {
            path: label.to_path_buf(),
            expected: E::COLUMNS.join(","),
            found: found.join(","),
        });
    }

    let mut entries = Vec::new();
    let mut rejected = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let cells = RowCells {
            row,
            columns: E::COLUMNS,
            record: &record,
        };
        match E::parse_row(&cells) {
            Ok(e) => entries.push(e),
            Err(RowError::Rejected(issue)) => rejected.push(issue),
            Err(RowError::Fatal(issue)) => {
                return Err(DatasetError::Cell {
                    path: label.to_path_buf(),
                    issue,
                })
            }
        }
    }
    if entries.is_empty() {
        return Err(no_rows(rejected));
    }
    Ok(Dataset {
        entries,
        provenance: Provenance {
            path: label.to_path_buf(),
            loaded_at: SystemTime::now(),
        },
        rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

/// Per-feature min/max/mean/count over the rows that carry the feature.
/// Features absent from every row are omitted.
pub fn summary_stats<E: SurveyRecord>(ds: &Dataset<E>) -> Vec<(&'static str, FeatureSummary)> {
    E::FEATURES
        .iter()
        .filter_map(|&name| {
            let values: Vec<f64> = ds.entries.iter().filter_map(|e| e.feature(name)).collect();
            if values.is_empty() {
                return None;
            }
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = (values.iter().sum::<f64>() / values.len() as f64).clamp(min, max);
            Some((
                name,
                FeatureSummary {
                    min,
                    max,
                    mean,
                    count: values.len(),
                },
            ))
        })
        .collect()
}

/// Default feature order of the PA correlation table.
pub const PA_CORRELATION_FEATURES: [&str; 4] = ["psat_dbm", "pae_pct", "gain_db", "area_mm2"];

/// Pearson correlation of one pair of columns using single-pass co-moment
/// accumulation. Returns `(r, n)`.
fn pearson_pair(pairs: impl Iterator<Item = (f64, f64)>) -> (Option<f64>, usize, bool, bool) {
    let (mut n, mut mx, mut my) = (0usize, 0.0f64, 0.0f64);
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in pairs {
        n += 1;
        let dx = x - mx;
        let dy = y - my;
        mx += dx / n as f64;
        my += dy / n as f64;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
    }
    let x_flat = sxx <= 0.0;
    let y_flat = syy <= 0.0;
    if n < 3 || x_flat || y_flat {
        return (None, n, x_flat, y_flat);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    (Some(r), n, false, false)
}

/// Pearson correlation matrix over `features`, pairwise-complete: each pair
/// uses the rows where both features are present.
pub fn correlation_matrix<E: SurveyRecord>(
    ds: &Dataset<E>,
    features: &[&str],
) -> Result<Vec<Vec<f64>>, StatsError> {
    if ds.entries.is_empty() {
        return Err(StatsError::Empty);
    }
    for f in features {
        if !E::FEATURES.contains(f) {
            return Err(StatsError::UnknownFeature(f.to_string()));
        }
    }
    let k = features.len();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let (fi, fj) = (features[i], features[j]);
            let pairs = ds
                .entries
                .iter()
                .filter_map(|e| Some((e.feature(fi)?, e.feature(fj)?)));
            let (r, n, x_flat, y_flat) = pearson_pair(pairs);
            if n < 3 {
                return Err(StatsError::TooFewRows(fi.into(), fj.into(), n));
            }
            if x_flat {
                return Err(StatsError::ZeroVariance(fi.into()));
            }
            if y_flat {
                return Err(StatsError::ZeroVariance(fj.into()));
            }
            let r = if i == j {
                1.0
            } else {
                r.expect("checked above")
            };
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    Ok(m)
}
