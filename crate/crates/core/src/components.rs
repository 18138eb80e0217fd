//! Figures of merit and DC-power models for the power amplifier, the
//! oscillator and the mixer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, MixerSurveyEntry, OscSurveyEntry, PaSurveyEntry};
use crate::regression::{
    best_point_indices, fit_exponential_weighted, fit_piecewise_parab_exp, Curve, CurveDocument,
    Domain, ExponentialCurve, FitError, FitReport, FitSummary, FrequencyCurve,
    PiecewiseParabExpCurve, Point, WeightedPoint, DEFAULT_BEST_POINT_WEIGHT, DEFAULT_BINS,
};
use crate::units::{dbm_to_mw, FrequencyGhz, PowerDbm, PowerMw};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComponentError {
    #[error("DC power must be positive, got {0} mW")]
    NonPositiveDc(f64),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("output power {p_out} is below input power {p_in}")]
    OutputBelowInput { p_out: f64, p_in: f64 },
    #[error("{what} at {freq} GHz is {value}, outside (0, 1]")]
    EfficiencyOutOfRange {
        what: &'static str,
        freq: f64,
        value: f64,
    },
    #[error("mixer efficiency at {freq} GHz is {value}, must be positive")]
    MixerEfficiencyOutOfRange { freq: f64, value: f64 },
    #[error("fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("model file holds a `{found}` model, expected `{expected}`")]
    WrongComponent {
        expected: &'static str,
        found: &'static str,
    },
    #[error("model curve has the wrong shape for a `{0}` model")]
    WrongCurveKind(&'static str),
}

/// PAE = (P_out − P_in) / P_DC, all in mW. Returns a fraction.
pub fn compute_pae(p_out: PowerMw, p_in: PowerMw, p_dc: PowerMw) -> Result<f64, ComponentError> {
    if p_dc.value() <= 0.0 {
        return Err(ComponentError::NonPositiveDc(p_dc.value()));
    }
    if p_out.value() < p_in.value() {
        return Err(ComponentError::OutputBelowInput {
            p_out: p_out.value(),
            p_in: p_in.value(),
        });
    }
    Ok((p_out.value() - p_in.value()) / p_dc.value())
}

/// Oscillator figure of merit in dB:
/// `PN + 10·log10(P_DC / 1 mW) − P_out − 20·log10(f_o / Δf)`.
/// `pn` in dBc/Hz, `delta_f_mhz` in MHz.
pub fn osc_fom(
    pn: f64,
    p_dc: PowerMw,
    p_out: PowerDbm,
    f_o: FrequencyGhz,
    delta_f_mhz: f64,
) -> Result<f64, ComponentError> {
    if p_dc.value() <= 0.0 {
        return Err(ComponentError::NonPositiveDc(p_dc.value()));
    }
    if !(delta_f_mhz > 0.0) {
        return Err(ComponentError::NonPositive("frequency offset", delta_f_mhz));
    }
    let offset_hz = delta_f_mhz * 1e6;
    Ok(pn + 10.0 * p_dc.value().log10() - p_out.value() - 20.0 * (f_o.hz() / offset_hz).log10())
}

/// DC-to-RF efficiency `P_RF / P_DC`.
pub fn osc_dc_to_rf_eff(p_rf: PowerMw, p_dc: PowerMw) -> Result<f64, ComponentError> {
    if p_dc.value() <= 0.0 {
        return Err(ComponentError::NonPositiveDc(p_dc.value()));
    }
    if p_rf.value() <= 0.0 {
        return Err(ComponentError::NonPositive("RF output power", p_rf.value()));
    }
    Ok(p_rf.value() / p_dc.value())
}

/// Mixer conversion gain `10·log10(P_RF,out / P_IF,in)` in dB.
pub fn mixer_cg(p_rf_out: PowerMw, p_if_in: PowerMw) -> Result<f64, ComponentError> {
    if p_rf_out.value() <= 0.0 {
        return Err(ComponentError::NonPositive(
            "RF output power",
            p_rf_out.value(),
        ));
    }
    if p_if_in.value() <= 0.0 {
        return Err(ComponentError::NonPositive(
            "IF input power",
            p_if_in.value(),
        ));
    }
    Ok(10.0 * (p_rf_out.value() / p_if_in.value()).log10())
}

/// DC power drawn at one operating point, plus the intermediate figure the
/// model used (PAE, efficiency, or mixer gain per mW).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerQuery {
    pub pdc: PowerMw,
    /// PAE (fraction), DC-to-RF efficiency (fraction), or η_mix (1/mW).
    pub figure: f64,
    pub extrapolated: bool,
}

fn unit_interval(what: &'static str, f: FrequencyGhz, value: f64) -> Result<f64, ComponentError> {
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(ComponentError::EfficiencyOutOfRange {
            what,
            freq: f.value(),
            value,
        })
    }
}

/// Fitting options shared by the model builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub bins: usize,
    pub best_point_weight: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            best_point_weight: DEFAULT_BEST_POINT_WEIGHT,
        }
    }
}

/// Power amplifier: PAE (fraction) versus frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaPowerModel {
    pub pae_curve: ExponentialCurve,
}

impl PaPowerModel {
    pub fn pae(&self, f: FrequencyGhz) -> Result<(f64, bool), ComponentError> {
        let e = self.pae_curve.evaluate(f);
        Ok((unit_interval("PAE", f, e.value)?, e.extrapolated))
    }

    /// `(mW(p_out) − mW(p_in)) / PAE(f)`; exactly 0 when `p_out == p_in`
    /// (amplifier bypassed).
    pub fn pa_pdc(
        &self,
        f: FrequencyGhz,
        p_out: PowerDbm,
        p_in: PowerDbm,
    ) -> Result<PowerQuery, ComponentError> {
        if p_out.value() < p_in.value() {
            return Err(ComponentError::OutputBelowInput {
                p_out: p_out.value(),
                p_in: p_in.value(),
            });
        }
        let (pae, extrapolated) = self.pae(f)?;
        let pdc = if p_out == p_in {
            PowerMw::ZERO
        } else {
            let delta = dbm_to_mw(p_out).value() - dbm_to_mw(p_in).value();
            PowerMw::new(delta / pae).map_err(|_| ComponentError::NonPositiveDc(delta / pae))?
        };
        Ok(PowerQuery {
            pdc,
            figure: pae,
            extrapolated,
        })
    }
}

/// Oscillator: DC-to-RF efficiency (fraction) versus frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscPowerModel {
    pub eff_curve: PiecewiseParabExpCurve,
}

impl OscPowerModel {
    pub fn efficiency(&self, f: FrequencyGhz) -> Result<(f64, bool), ComponentError> {
        let e = self.eff_curve.evaluate(f);
        Ok((
            unit_interval("DC-to-RF efficiency", f, e.value)?,
            e.extrapolated,
        ))
    }

    /// `mW(p_rf) / efficiency(f)`.
    pub fn osc_pdc(&self, f: FrequencyGhz, p_rf: PowerDbm) -> Result<PowerQuery, ComponentError> {
        let (eff, extrapolated) = self.efficiency(f)?;
        let pdc = dbm_to_mw(p_rf).value() / eff;
        Ok(PowerQuery {
            pdc: PowerMw::new(pdc).map_err(|_| ComponentError::NonPositiveDc(pdc))?,
            figure: eff,
            extrapolated,
        })
    }
}

/// Default fixed IF input level of the mixer.
pub const DEFAULT_MIXER_PIF_IN_DBM: f64 = -20.0;

/// Mixer: linear conversion gain per mW of DC power (η_mix) versus
/// frequency, at a fixed IF input level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixerPowerModel {
    pub eff_curve: ExponentialCurve,
    pub pif_in: PowerDbm,
}

impl MixerPowerModel {
    pub fn eta(&self, f: FrequencyGhz) -> Result<(f64, bool), ComponentError> {
        let e = self.eff_curve.evaluate(f);
        if !(e.value > 0.0 && e.value.is_finite()) {
            return Err(ComponentError::MixerEfficiencyOutOfRange {
                freq: f.value(),
                value: e.value,
            });
        }
        Ok((e.value, e.extrapolated))
    }

    /// Linear conversion gain needed to reach `p_rf_out` from the fixed IF input.
    pub fn linear_gain(&self, p_rf_out: PowerDbm) -> f64 {
        dbm_to_mw(p_rf_out).value() / dbm_to_mw(self.pif_in).value()
    }

    /// `G_lin / η_mix(f)`.
    pub fn mixer_pdc(
        &self,
        f: FrequencyGhz,
        p_rf_out: PowerDbm,
    ) -> Result<PowerQuery, ComponentError> {
        let (eta, extrapolated) = self.eta(f)?;
        let pdc = self.linear_gain(p_rf_out) / eta;
        Ok(PowerQuery {
            pdc: PowerMw::new(pdc).map_err(|_| ComponentError::NonPositiveDc(pdc))?,
            figure: eta,
            extrapolated,
        })
    }
}

fn weighted_by_best(
    pts: &[Point],
    opts: &FitOptions,
) -> Result<(Vec<WeightedPoint>, usize), FitError> {
    let best = best_point_indices(pts, opts.bins)?;
    let weighted = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let w = if best.contains(&i) {
                opts.best_point_weight
            } else {
                1.0
            };
            WeightedPoint::new(p.f, p.y, w)
        })
        .collect();
    Ok((weighted, best.len()))
}

fn dataset_domain(fs: impl Iterator<Item = f64>) -> Result<Domain, FitError> {
    let (lo, hi) = fs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f), hi.max(f))
    });
    if lo == hi {
        return Err(FitError::IdenticalFrequencies(lo));
    }
    Domain::new(lo, hi)
}

/// PAE percentages become fractions here, then a weighted exponential fit
/// with best points weighted up.
pub fn build_pa_model(
    ds: &Dataset<PaSurveyEntry>,
    opts: &FitOptions,
) -> Result<(PaPowerModel, FitReport), ComponentError> {
    let pts: Vec<Point> = ds
        .entries()
        .iter()
        .map(|e| Point::new(e.freq, e.pae / 100.0))
        .collect();
    let (weighted, n_best) = weighted_by_best(&pts, opts)?;
    let (curve, mut report) = fit_exponential_weighted(&weighted)?;
    report.n_best_points = n_best;
    Ok((PaPowerModel { pae_curve: curve }, report))
}

/// Per-entry DC-to-RF efficiency, best points per bin, piecewise fit on the
/// best points. The model domain is the span of the whole dataset.
pub fn build_osc_model(
    ds: &Dataset<OscSurveyEntry>,
    opts: &FitOptions,
) -> Result<(OscPowerModel, FitReport), ComponentError> {
    let pts = ds
        .entries()
        .iter()
        .map(|e| {
            Ok(Point::new(
                e.freq,
                osc_dc_to_rf_eff(dbm_to_mw(e.pout), e.pdc)?,
            ))
        })
        .collect::<Result<Vec<_>, ComponentError>>()?;
    let best: Vec<Point> = best_point_indices(&pts, opts.bins)?
        .into_iter()
        .map(|i| pts[i])
        .collect();
    let (curve, mut report) = fit_piecewise_parab_exp(&best)?;
    report.n_best_points = best.len();
    report.n_points = pts.len();
    let domain = dataset_domain(pts.iter().map(|p| p.f.value()))?;
    Ok((
        OscPowerModel {
            eff_curve: curve.with_domain(domain),
        },
        report,
    ))
}

/// η_mix = 10^(CG/10) / P_DC per entry, then a weighted exponential fit
/// with best points weighted up.
pub fn build_mixer_model(
    ds: &Dataset<MixerSurveyEntry>,
    opts: &FitOptions,
    pif_in: PowerDbm,
) -> Result<(MixerPowerModel, FitReport), ComponentError> {
    let pts: Vec<Point> = ds
        .entries()
        .iter()
        .map(|e| Point::new(e.freq, 10f64.powf(e.cg / 10.0) / e.pdc.value()))
        .collect();
    let (weighted, n_best) = weighted_by_best(&pts, opts)?;
    let (curve, mut report) = fit_exponential_weighted(&weighted)?;
    report.n_best_points = n_best;
    Ok((
        MixerPowerModel {
            eff_curve: curve,
            pif_in,
        },
        report,
    ))
}

/// Which front-end block a model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Pa,
    Osc,
    Mixer,
}

impl ComponentKind {
    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::Pa => "pa",
            ComponentKind::Osc => "osc",
            ComponentKind::Mixer => "mixer",
        }
    }
}

/// A component model as stored on disk:
/// `{"component": ..., "pif_in_dbm": ... (mixer only), "curve": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub component: ComponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pif_in_dbm: Option<f64>,
    pub curve: CurveDocument,
}

/// A loaded model of any kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentModel {
    Pa(PaPowerModel),
    Osc(OscPowerModel),
    Mixer(MixerPowerModel),
}

impl ComponentModel {
    pub fn kind(&self) -> ComponentKind {
        match self {
            ComponentModel::Pa(_) => ComponentKind::Pa,
            ComponentModel::Osc(_) => ComponentKind::Osc,
            ComponentModel::Mixer(_) => ComponentKind::Mixer,
        }
    }

    pub fn curve(&self) -> Curve {
        match self {
            ComponentModel::Pa(m) => Curve::Exponential(m.pae_curve),
            ComponentModel::Osc(m) => Curve::ParabExp(m.eff_curve),
            ComponentModel::Mixer(m) => Curve::Exponential(m.eff_curve),
        }
    }

    pub fn to_file(&self, report: &FitReport) -> ModelFile {
        self.to_file_with(FitSummary::from(report))
    }

    pub fn to_file_with(&self, fit: FitSummary) -> ModelFile {
        ModelFile {
            component: self.kind(),
            pif_in_dbm: match self {
                ComponentModel::Mixer(m) => Some(m.pif_in.value()),
                _ => None,
            },
            curve: CurveDocument {
                curve: self.curve(),
                fit,
            },
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self, ComponentError> {
        let kind = file.component;
        match (kind, file.curve.curve) {
            (ComponentKind::Pa, Curve::Exponential(c)) => {
                Ok(ComponentModel::Pa(PaPowerModel { pae_curve: c }))
            }
            (ComponentKind::Osc, Curve::ParabExp(c)) => {
                Ok(ComponentModel::Osc(OscPowerModel { eff_curve: c }))
            }
            (ComponentKind::Mixer, Curve::Exponential(c)) => {
                let pif = file.pif_in_dbm.unwrap_or(DEFAULT_MIXER_PIF_IN_DBM);
                let pif_in = PowerDbm::new(pif)
                    .map_err(|_| ComponentError::NonPositive("IF input level", pif))?;
                Ok(ComponentModel::Mixer(MixerPowerModel {
                    eff_curve: c,
                    pif_in,
                }))
            }
            (kind, _) => Err(ComponentError::WrongCurveKind(kind.name())),
        }
    }

    pub fn into_pa(self) -> Result<PaPowerModel, ComponentError> {
        match self {
            ComponentModel::Pa(m) => Ok(m),
            other => Err(ComponentError::WrongComponent {
                expected: "pa",
                found: other.kind().name(),
            }),
        }
    }

    pub fn into_osc(self) -> Result<OscPowerModel, ComponentError> {
        match self {
            ComponentModel::Osc(m) => Ok(m),
            other => Err(ComponentError::WrongComponent {
                expected: "osc",
                found: other.kind().name(),
            }),
        }
    }

    pub fn into_mixer(self) -> Result<MixerPowerModel, ComponentError> {
        match self {
            ComponentModel::Mixer(m) => Ok(m),
            other => Err(ComponentError::WrongComponent {
                expected: "mixer",
                found: other.kind().name(),
            }),
        }
    }
}
