//! Static SVG charts: stacked DC-power shares from a breakdown table and
//! fitted figure-of-merit curves from a model file.
//!
//! Output depends only on the input; numbers are printed with fixed
//! precision so identical input gives identical bytes.

use std::fmt::Write as _;

use crate::chain::BreakdownRecord;
use crate::components::{ComponentKind, ModelFile};
use crate::regression::FrequencyCurve;

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 420.0;
/// Samples along a model curve.
pub const CURVE_SAMPLES: usize = 200;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PA_COLOR: &str = "#1f77b4";
const MIXER_COLOR: &str = "#ff7f0e";
const OSC_COLOR: &str = "#2ca02c";

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w() / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0) = (LEFT, TOP + plot_h());
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black"/>"#,
        LEFT + plot_w()
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{x0:.2}" y1="{TOP:.2}" x2="{x0:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0,
        escape(y_label)
    );
}

fn y_ticks(s: &mut String, lo: f64, hi: f64, fmt: impl Fn(f64) -> String) {
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = TOP + plot_h() * (1.0 - i as f64 / 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt(v)
        );
    }
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    let x = LEFT + plot_w() + 16.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{x:.2}" y="{y:.2}" width="12" height="12" fill="{color}"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 18.0,
            y + 10.0,
            escape(label)
        );
    }
}

/// Stacked share bars: one group per frequency, one bar per table row,
/// segments PA / mixer / oscillator from the bottom. Rows without numbers
/// (failed cells) keep their slot but draw no segments.
pub fn breakdown_svg(rows: &[BreakdownRecord]) -> String {
    let mut groups: Vec<(f64, Vec<&BreakdownRecord>)> = Vec::new();
    for r in rows {
        match groups.last_mut() {
            Some((f, g)) if *f == r.freq_ghz => g.push(r),
            _ => groups.push((r.freq_ghz, vec![r])),
        }
    }

    let mut s = open("Transmitter DC power breakdown");
    axes(
        &mut s,
        "Frequency (GHz) / mixer output (dBm)",
        "Share of total DC power (%)",
    );
    y_ticks(&mut s, 0.0, 100.0, |v| format!("{v:.0}"));

    let n_groups = groups.len().max(1) as f64;
    let group_w = plot_w() / n_groups;
    for (gi, (f, members)) in groups.iter().enumerate() {
        let gx = LEFT + group_w * gi as f64;
        let bar_w = group_w * 0.8 / members.len() as f64;
        let _ = writeln!(s, r#"<g class="group" data-freq-ghz="{f}">"#);
        for (bi, r) in members.iter().enumerate() {
            let x = gx + group_w * 0.1 + bar_w * bi as f64;
            let shares = [
                (r.pa_share, PA_COLOR, "pa"),
                (r.mixer_share, MIXER_COLOR, "mixer"),
                (r.osc_share, OSC_COLOR, "osc"),
            ];
            let mut base = TOP + plot_h();
            for (share, color, name) in shares {
                let Some(share) = share else { continue };
                let h = share.clamp(0.0, 1.0) * plot_h();
                base -= h;
                let _ = writeln!(
                    s,
                    r#"<rect class="segment {name}" x="{x:.2}" y="{base:.2}" width="{:.2}" height="{h:.2}" fill="{color}"/>"#,
                    bar_w * 0.9
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="8">{}</text>"#,
                x + bar_w * 0.45,
                TOP + plot_h() + 12.0,
                r.mixer_pout_dbm
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{f}</text>"#,
            gx + group_w / 2.0,
            TOP + plot_h() + 28.0
        );
        s.push_str("</g>\n");
    }
    legend(
        &mut s,
        &[
            ("PA", PA_COLOR),
            ("Mixer", MIXER_COLOR),
            ("Oscillator", OSC_COLOR),
        ],
    );
    s.push_str("</svg>\n");
    s
}

/// The model's fitted curve over its domain as a single polyline.
pub fn model_svg(model: &ModelFile) -> String {
    let curve = model.curve.curve;
    let d = curve.domain();
    let samples: Vec<(f64, f64)> = (0..CURVE_SAMPLES)
        .map(|i| {
            let f = if i == CURVE_SAMPLES - 1 {
                d.hi()
            } else {
                d.lo() + (d.hi() - d.lo()) * i as f64 / (CURVE_SAMPLES - 1) as f64
            };
            (f, curve.value_at(f))
        })
        .collect();
    let y_hi = samples
        .iter()
        .map(|p| p.1)
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let y_hi = if y_hi > 0.0 { y_hi * 1.1 } else { 1.0 };

    let (title, y_label) = match model.component {
        ComponentKind::Pa => ("PA model", "PAE"),
        ComponentKind::Osc => ("Oscillator model", "DC-to-RF efficiency"),
        ComponentKind::Mixer => ("Mixer model", "Linear conversion gain per mW"),
    };
    let mut s = open(title);
    axes(&mut s, "Frequency (GHz)", y_label);
    y_ticks(&mut s, 0.0, y_hi, |v| format!("{v:.3}"));
    for i in 0..=4 {
        let f = d.lo() + (d.hi() - d.lo()) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{f:.1}</text>"#,
            LEFT + plot_w() * i as f64 / 4.0,
            TOP + plot_h() + 16.0
        );
    }
    let points: Vec<String> = samples
        .iter()
        .map(|&(f, v)| {
            let x = LEFT + plot_w() * (f - d.lo()) / (d.hi() - d.lo());
            let y = TOP + plot_h() * (1.0 - (v / y_hi).clamp(0.0, 1.0));
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="curve" fill="none" stroke="{PA_COLOR}" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    s.push_str("</svg>\n");
    s
}
