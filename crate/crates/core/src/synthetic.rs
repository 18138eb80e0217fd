//! Deterministic synthetic survey datasets.
//!
//! Each generator draws devices around a known "best achievable" trend and
//! scales most of them down by a random design-quality factor, so the upper
//! envelope of the scatter follows the trend. A few anchor designs per
//! dataset sit close to the trend at fixed frequencies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{MixerSurveyEntry, OscSurveyEntry, PaSurveyEntry};
use crate::units::{dbm_to_mw, FrequencyGhz, PowerDbm, PowerMw};

pub const DEFAULT_SEED: u64 = 0x5EED_2025;

/// Best-in-class PAE trend in percent: `PA_PAE_PEAK_PCT · exp(PA_PAE_RATE · f)`.
pub const PA_PAE_PEAK_PCT: f64 = 35.0;
pub const PA_PAE_RATE: f64 = -0.008;
pub const PA_FREQ_RANGE: (f64, f64) = (20.0, 320.0);

/// Oscillator DC-to-RF efficiency trend: parabola up to the peak, then
/// exponential decay.
pub const OSC_PEAK_GHZ: f64 = 42.0;
pub const OSC_PEAK_EFF: f64 = 0.12;
pub const OSC_CURVATURE: f64 = -7e-5;
pub const OSC_DECAY_RATE: f64 = -0.012;
pub const OSC_FREQ_RANGE: (f64, f64) = (12.7, 272.0);

/// Mixer gain-per-DC-power trend (1/mW): `MIXER_ETA_A · exp(MIXER_ETA_RATE · f)`.
pub const MIXER_ETA_A: f64 = 8.0;
pub const MIXER_ETA_RATE: f64 = -0.012;
pub const MIXER_FREQ_RANGE: (f64, f64) = (18.0, 140.0);

pub fn pa_trend_pct(f: f64) -> f64 {
    PA_PAE_PEAK_PCT * (PA_PAE_RATE * f).exp()
}

pub fn osc_trend(f: f64) -> f64 {
    if f <= OSC_PEAK_GHZ {
        OSC_PEAK_EFF + OSC_CURVATURE * (f - OSC_PEAK_GHZ).powi(2)
    } else {
        OSC_PEAK_EFF * (OSC_DECAY_RATE * (f - OSC_PEAK_GHZ)).exp()
    }
}

pub fn mixer_trend(f: f64) -> f64 {
    MIXER_ETA_A * (MIXER_ETA_RATE * f).exp()
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn ghz(f: f64) -> FrequencyGhz {
    FrequencyGhz::new(f).expect("generated frequency is positive")
}

fn dbm(p: f64) -> PowerDbm {
    PowerDbm::new(p).expect("generated power is finite")
}

/// Frequencies: anchors first (near-trend designs), then random draws.
fn frequencies(
    rng: &mut ChaCha8Rng,
    range: (f64, f64),
    anchors: &[f64],
    n_random: usize,
) -> Vec<(f64, bool)> {
    let mut out: Vec<(f64, bool)> = anchors.iter().map(|&f| (f, true)).collect();
    for _ in 0..n_random {
        out.push((round_to(log_uniform(rng, range), 1), false));
    }
    out
}

fn quality(rng: &mut ChaCha8Rng, anchor: bool) -> f64 {
    if anchor {
        rng.gen_range(0.93..1.0)
    } else {
        rng.gen_range(0.25..0.85)
    }
}

const TECHNOLOGIES: [&str; 6] = [
    "CMOS 28nm",
    "CMOS 40nm",
    "CMOS 65nm",
    "CMOS 22nm FD-SOI",
    "SiGe BiCMOS",
    "InP HBT",
];

fn technology(rng: &mut ChaCha8Rng) -> String {
    // CMOS-heavy mix
    let weights = [5, 4, 4, 3, 2, 1];
    let total: u32 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    for (t, w) in TECHNOLOGIES.iter().zip(weights) {
        if pick < w {
            return t.to_string();
        }
        pick -= w;
    }
    unreachable!()
}

pub fn generate_pa(seed: u64) -> Vec<PaSurveyEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchors = [
        20.0, 28.0, 39.0, 60.0, 77.0, 94.0, 140.0, 200.0, 243.0, 320.0,
    ];
    let psat_noise = Normal::new(0.0, 2.0).expect("valid sigma");
    let mut rows = frequencies(&mut rng, PA_FREQ_RANGE, &anchors, 70);
    rows.shuffle(&mut rng);
    rows.into_iter()
        .enumerate()
        .map(|(i, (f, anchor))| {
            let pae = round_to(pa_trend_pct(f) * quality(&mut rng, anchor), 2).max(0.01);
            let psat = round_to(4.0 + 0.3 * pae + psat_noise.sample(&mut rng), 2);
            let gain = round_to(rng.gen_range(10.0..26.0), 1);
            let area =
                (rng.gen_range(0.0..1.0) > 0.15).then(|| round_to(rng.gen_range(0.05..1.2), 3));
            PaSurveyEntry {
                freq: ghz(f),
                psat: dbm(psat),
                pae,
                gain,
                area,
                technology: Some(technology(&mut rng)),
                source: Some(format!("synthetic-pa-{i:03}")),
            }
        })
        .collect()
}

pub fn generate_osc(seed: u64) -> Vec<OscSurveyEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let anchors = [
        12.7, 15.0, 22.0, 33.0, 42.0, 70.0, 105.0, 150.0, 230.0, 272.0,
    ];
    let mut rows = frequencies(&mut rng, OSC_FREQ_RANGE, &anchors, 50);
    rows.shuffle(&mut rng);
    rows.into_iter()
        .enumerate()
        .map(|(i, (f, anchor))| {
            let eff = osc_trend(f) * quality(&mut rng, anchor);
            let pout = round_to(rng.gen_range(-15.0..5.0), 1);
            let pdc = round_to(dbm_to_mw(dbm(pout)).value() / eff, 4).max(1e-4);
            let offset = if rng.gen_bool(0.5) { 1.0 } else { 10.0 };
            OscSurveyEntry {
                freq: ghz(f),
                pdc: PowerMw::new(pdc).expect("positive"),
                pout: dbm(pout),
                phase_noise: round_to(rng.gen_range(-118.0..-78.0), 1),
                offset,
                technology: Some(technology(&mut rng)),
                source: Some(format!("synthetic-osc-{i:03}")),
            }
        })
        .collect()
}

pub fn generate_mixer(seed: u64) -> Vec<MixerSurveyEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let anchors = [18.0, 24.0, 30.0, 45.0, 60.0, 77.0, 94.0, 120.0, 140.0];
    let mut rows = frequencies(&mut rng, MIXER_FREQ_RANGE, &anchors, 31);
    rows.shuffle(&mut rng);
    rows.into_iter()
        .enumerate()
        .map(|(i, (f, anchor))| {
            let cg = round_to(rng.gen_range(-6.0..12.0), 1);
            let eta = mixer_trend(f) * quality(&mut rng, anchor);
            let pdc = round_to(10f64.powf(cg / 10.0) / eta, 4).max(1e-4);
            MixerSurveyEntry {
                freq: ghz(f),
                pdc: PowerMw::new(pdc).expect("positive"),
                cg,
                technology: Some(technology(&mut rng)),
                source: Some(format!("synthetic-mixer-{i:03}")),
            }
        })
        .collect()
}
