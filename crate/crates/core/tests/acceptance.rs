mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::*;
use wnoc_power::chain::{compose, ChainConfig};
use wnoc_power::components::{
    build_mixer_model, build_osc_model, build_pa_model, compute_pae, mixer_cg, osc_dc_to_rf_eff,
    osc_fom, FitOptions, MixerPowerModel, OscPowerModel, PaPowerModel, DEFAULT_MIXER_PIF_IN_DBM,
};
use wnoc_power::dataset::{
    correlation_matrix, load_mixer_csv, load_osc_csv, load_pa_csv, Dataset, PaSurveyEntry,
    PA_CORRELATION_FEATURES,
};
use wnoc_power::regression::{
    best_point_indices, fit_exponential_loglinear, fit_exponential_weighted,
    fit_piecewise_parab_exp, knot_candidates, points, sum_squared_residual, FrequencyCurve, Point,
    WeightedPoint,
};
use wnoc_power::units::{dbm_to_mw, mw_to_dbm, FrequencyGhz, PowerDbm, PowerMw};

fn report(id: u32, name: &str, result: Result<(), String>) {
    match &result {
        Ok(()) => println!("criterion {id:>2} {name}: PASS"),
        Err(e) => println!("criterion {id:>2} {name}: FAIL ({e})"),
    }
    if let Err(e) = result {
        panic!("criterion {id} failed: {e}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ghz(f: f64) -> FrequencyGhz {
    FrequencyGhz::new(f).unwrap()
}

fn dbm(p: f64) -> PowerDbm {
    PowerDbm::new(p).unwrap()
}

fn mw(p: f64) -> PowerMw {
    PowerMw::new(p).unwrap()
}

struct Bundled {
    pa: PaPowerModel,
    mixer: MixerPowerModel,
    osc: OscPowerModel,
}

fn bundled_models() -> Bundled {
    let opts = FitOptions::default();
    let pa = build_pa_model(&load_pa_csv(data_path("pa.csv")).unwrap(), &opts)
        .unwrap()
        .0;
    let osc = build_osc_model(&load_osc_csv(data_path("osc.csv")).unwrap(), &opts)
        .unwrap()
        .0;
    let mixer = build_mixer_model(
        &load_mixer_csv(data_path("mixer.csv")).unwrap(),
        &opts,
        dbm(DEFAULT_MIXER_PIF_IN_DBM),
    )
    .unwrap()
    .0;
    Bundled { pa, mixer, osc }
}

#[test]
fn criterion_01_unit_round_trip() {
    let run = || {
        let start = Instant::now();
        let n = 10_000;
        for i in 0..n {
            let x = -60.0 + 100.0 * i as f64 / (n - 1) as f64;
            let back = mw_to_dbm(dbm_to_mw(dbm(x)))
                .map_err(|e| e.to_string())?
                .value();
            ensure((back - x).abs() < 1e-9, || {
                format!("{x} dBm came back as {back}")
            })?;
        }
        let t = start.elapsed();
        ensure(t < Duration::from_secs(1), || format!("took {t:?}"))
    };
    report(1, "unit round trip", run());
}

#[test]
fn criterion_02_figure_of_merit_formulas() {
    let run = || {
        let fom =
            osc_fom(-100.0, mw(10.0), dbm(0.0), ghz(100.0), 1.0).map_err(|e| e.to_string())?;
        ensure((fom - -190.0).abs() <= 1e-9, || {
            format!("oscillator FOM {fom}")
        })?;
        let cg = mixer_cg(mw(1.0), mw(0.1)).map_err(|e| e.to_string())?;
        ensure((cg - 10.0).abs() <= 1e-9, || {
            format!("conversion gain {cg}")
        })?;
        let pae = compute_pae(mw(1.0), mw(0.01), mw(9.9)).map_err(|e| e.to_string())?;
        ensure((pae - 0.1).abs() <= 1e-12, || format!("PAE {pae}"))?;
        let eff = osc_dc_to_rf_eff(mw(0.1), mw(10.0)).map_err(|e| e.to_string())?;
        ensure((eff - 0.01).abs() <= 1e-15, || format!("efficiency {eff}"))
    };
    report(2, "figure-of-merit formulas", run());
}

/// 50 (a, b) pairs, 1000 log-linear samples over 10..300 GHz each.
#[test]
fn criterion_03_fit_recovery() {
    let run = || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let n = 1000;
        let freqs: Vec<f64> = (0..n)
            .map(|i| 10.0 + 290.0 * i as f64 / (n - 1) as f64)
            .collect();
        let mut worst_noisy = (0.0f64, 0.0f64);
        for case in 0..50 {
            let a = rng.gen_range(0.01..=10.0);
            let b = -rng.gen_range(0.0..=0.05);
            let clean: Vec<(f64, f64)> = freqs.iter().map(|&f| (f, a * (b * f).exp())).collect();
            let (c, _) = fit_exponential_loglinear(&points(&clean)).map_err(|e| e.to_string())?;
            ensure(rel_err(c.a, a) <= 1e-9 && rel_err(c.b, b) <= 1e-9, || {
                format!(
                    "case {case}: noiseless (a, b) = ({a}, {b}) fitted ({}, {})",
                    c.a, c.b
                )
            })?;

            let noisy: Vec<(f64, f64)> = clean
                .iter()
                .map(|&(f, y)| (f, y * (1.0 + noise.sample(&mut rng))))
                .collect();
            let (c, _) = fit_exponential_loglinear(&points(&noisy)).map_err(|e| e.to_string())?;
            let (ea, eb) = (rel_err(c.a, a), rel_err(c.b, b));
            worst_noisy = (worst_noisy.0.max(ea), worst_noisy.1.max(eb));
            ensure(ea <= 0.10 && eb <= 0.10, || {
                format!(
                    "case {case}: noisy (a, b) = ({a}, {b}) fitted ({}, {}), relative errors ({ea:.3}, {eb:.3})",
                    c.a, c.b
                )
            })?;
        }
        println!(
            "  worst noisy relative error: a {:.4}, b {:.4}",
            worst_noisy.0, worst_noisy.1
        );
        let t = start.elapsed();
        ensure(t < Duration::from_secs(5), || format!("took {t:?}"))
    };
    report(3, "exponential fit recovery", run());
}

#[test]
fn criterion_04_weighted_fit_matches_closed_form() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..100 {
            let n = rng.gen_range(2..60);
            let mut pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(1.0..400.0), rng.gen_range(1e-3..50.0)))
                .collect();
            pts[0].0 = 0.5;
            let plain = points(&pts);
            let weighted: Vec<WeightedPoint> = plain
                .iter()
                .map(|p| WeightedPoint::new(p.f, p.y, 1.0))
                .collect();
            let (w, _) = fit_exponential_weighted(&weighted).map_err(|e| e.to_string())?;
            let (u, _) = fit_exponential_loglinear(&plain).map_err(|e| e.to_string())?;
            ensure(
                rel_err(w.a, u.a) <= 1e-9 && rel_err(w.b, u.b) <= 1e-9,
                || {
                    format!(
                        "case {case}: weighted ({}, {}) vs closed form ({}, {})",
                        w.a, w.b, u.a, u.b
                    )
                },
            )?;
        }
        Ok(())
    };
    report(4, "weighted fit equals closed form", run());
}

#[test]
fn criterion_05_piecewise_knot_recovery() {
    let run = || {
        let opts = FitOptions::default();
        let ds = load_osc_csv(data_path("osc.csv")).map_err(|e| e.to_string())?;
        let (model, _) = build_osc_model(&ds, &opts).map_err(|e| e.to_string())?;
        let knot = model.eff_curve.knot.value();

        // the same best points the model was fitted on
        let all: Vec<Point> = ds
            .entries()
            .iter()
            .map(|e| Point::new(e.freq, dbm_to_mw(e.pout).value() / e.pdc.value()))
            .collect();
        let best: Vec<Point> = best_point_indices(&all, opts.bins)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|i| all[i])
            .collect();
        let grid = knot_candidates(&best);
        let step = grid
            .windows(2)
            .filter(|w| w[0] <= 42.0 && 42.0 <= w[1] || w[0] <= knot && knot <= w[1])
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        println!("  knot {knot} GHz, grid step {step} GHz");
        ensure((knot - 42.0).abs() <= step, || {
            format!("knot {knot} GHz, grid step {step}")
        })?;

        let (piecewise, _) = fit_piecewise_parab_exp(&best).map_err(|e| e.to_string())?;
        ensure(
            piecewise == model.eff_curve.with_domain(piecewise.domain()),
            || "refit on best points differs from model".into(),
        )?;
        let pw = sum_squared_residual(&piecewise, &best);
        let (exp, _) = fit_exponential_loglinear(&best).map_err(|e| e.to_string())?;
        let loglin = sum_squared_residual(&exp, &best);
        let raw: Vec<(f64, f64)> = best.iter().map(|p| (p.f.value(), p.y)).collect();
        let nls = best_exponential_ssr(&raw);
        println!("  residuals: piecewise {pw:.3e}, log-linear exp {loglin:.3e}, least-squares exp {nls:.3e}");
        ensure(pw <= loglin && pw <= nls, || {
            format!("piecewise {pw} vs exponential {loglin} / {nls}")
        })
    };
    report(5, "piecewise knot recovery", run());
}

#[test]
fn criterion_06_best_point_selection() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for case in 0..200 {
            let n = rng.gen_range(1..80);
            let bins = rng.gen_range(1..12);
            // coarse grids force shared frequencies and equal values
            let coarse = case % 2 == 0;
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    if coarse {
                        (
                            [10.0, 20.0, 28.0, 60.0, 94.0, 140.0, 243.0][rng.gen_range(0..7)],
                            rng.gen_range(0..4) as f64,
                        )
                    } else {
                        (rng.gen_range(5.0..500.0), rng.gen_range(0.0..1.0))
                    }
                })
                .collect();
            let got = best_point_indices(&points(&pts), bins).map_err(|e| e.to_string())?;
            let want = best_points_oracle(&pts, bins);
            ensure(got == want, || {
                format!("case {case}: {got:?} vs oracle {want:?}")
            })?;
        }
        Ok(())
    };
    report(6, "best-point selection", run());
}

fn random_pa(rng: &mut ChaCha8Rng) -> Vec<PaSurveyEntry> {
    let n = rng.gen_range(5..60);
    (0..n)
        .map(|_| {
            let pae = rng.gen_range(0.5..60.0);
            PaSurveyEntry {
                freq: ghz(rng.gen_range(10.0..300.0)),
                psat: dbm(3.0 + 0.3 * pae + rng.gen_range(-3.0..3.0)),
                pae,
                gain: rng.gen_range(5.0..30.0),
                area: rng.gen_bool(0.8).then(|| rng.gen_range(0.01..2.0)),
                technology: None,
                source: None,
            }
        })
        .collect()
}

#[test]
fn criterion_07_correlation_matrix() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let names = PA_CORRELATION_FEATURES;
        let mut checked = 0;
        for case in 0..100 {
            let mut entries = random_pa(&mut rng);
            // keep at least 3 rows with an area
            for e in entries.iter_mut().take(3) {
                e.area.get_or_insert(0.3 + rng.gen_range(0.0..1.0));
            }
            let ds = Dataset::from_entries(entries.clone(), "random").unwrap();
            let m = correlation_matrix(&ds, &names).map_err(|e| format!("case {case}: {e}"))?;
            for i in 0..4 {
                ensure(m[i][i] == 1.0, || {
                    format!("case {case}: diagonal {}", m[i][i])
                })?;
                for j in 0..4 {
                    ensure(m[i][j] == m[j][i], || format!("case {case}: asymmetric"))?;
                    ensure((-1.0..=1.0).contains(&m[i][j]), || {
                        format!("case {case}: {}", m[i][j])
                    })?;
                    if i == j {
                        continue;
                    }
                    let (xs, ys): (Vec<f64>, Vec<f64>) = entries
                        .iter()
                        .filter_map(|e| {
                            use wnoc_power::dataset::SurveyRecord;
                            Some((e.feature(names[i])?, e.feature(names[j])?))
                        })
                        .unzip();
                    let r = pearson_oracle(&xs, &ys);
                    ensure((m[i][j] - r).abs() <= 1e-12, || {
                        format!("case {case}: ({i},{j}) {} vs oracle {r}", m[i][j])
                    })?;
                    checked += 1;
                }
            }

            let k = [
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
            ];
            let scaled: Vec<PaSurveyEntry> = entries
                .iter()
                .map(|e| PaSurveyEntry {
                    psat: dbm(e.psat.value() * k[0]),
                    pae: e.pae * k[1],
                    gain: e.gain * k[2],
                    area: e.area.map(|a| a * k[3]),
                    ..e.clone()
                })
                .collect();
            let ds2 = Dataset::from_entries(scaled, "scaled").unwrap();
            let m2 = correlation_matrix(&ds2, &names).map_err(|e| e.to_string())?;
            for i in 0..4 {
                for j in 0..4 {
                    ensure((m[i][j] - m2[i][j]).abs() <= 1e-12, || {
                        format!(
                            "case {case}: scaling moved ({i},{j}) from {} to {}",
                            m[i][j], m2[i][j]
                        )
                    })?;
                }
            }
        }
        println!("  {checked} off-diagonal entries checked");
        Ok(())
    };
    report(7, "correlation matrix", run());
}

#[test]
fn criterion_08_chain_decomposition() {
    let run = || {
        let m = bundled_models();
        let cfg = ChainConfig::default();
        let cells = compose(&cfg, &m.pa, &m.mixer, &m.osc).map_err(|e| e.to_string())?;
        ensure(cells.len() == 16, || format!("{} cells", cells.len()))?;
        for c in &cells {
            let b = c.as_ref().map_err(|e| e.to_string())?;
            let sum = b.pa_pdc.value() + b.mixer_pdc.value() + b.osc_pdc.value();
            ensure(sum == b.total_pdc.value(), || {
                format!("{} GHz: total mismatch", b.f)
            })?;
            let shares = b.shares.pa + b.shares.mixer + b.shares.osc;
            ensure((shares - 1.0).abs() <= 1e-9, || {
                format!("{} GHz: shares sum {shares}", b.f)
            })?;
            if b.mixer_pout == cfg.pa_pout {
                ensure(b.pa_pdc.value() == 0.0, || {
                    format!("{} GHz: bypassed PA draws power", b.f)
                })?;
            }
        }
        Ok(())
    };
    report(8, "chain decomposition", run());
}

#[test]
fn criterion_09_extrapolation_flagging() {
    let run = || {
        let m = bundled_models();
        ensure(m.mixer.eff_curve.domain().hi() <= 140.0, || {
            "mixer domain".into()
        })?;
        ensure(m.pa.pae_curve.domain().contains(243.0), || {
            "PA domain".into()
        })?;
        ensure(m.osc.eff_curve.domain().contains(243.0), || {
            "osc domain".into()
        })?;
        let cfg = ChainConfig {
            frequencies: vec![ghz(243.0)],
            ..ChainConfig::default()
        };
        for c in compose(&cfg, &m.pa, &m.mixer, &m.osc).map_err(|e| e.to_string())? {
            let b = c.map_err(|e| e.to_string())?;
            let flags = b.extrapolated;
            ensure(flags.mixer && !flags.pa && !flags.osc, || {
                format!("flags {flags:?}")
            })?;
        }
        Ok(())
    };
    report(9, "extrapolation flagging", run());
}

#[test]
fn criterion_10_monotonicity_and_linearity() {
    let run = || {
        let m = bundled_models();
        let d = m.pa.pae_curve.domain();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..50 {
            let f = d.lo() + (d.hi() - d.lo()) * i as f64 / 49.0;
            let p =
                m.pa.pa_pdc(ghz(f), dbm(0.0), dbm(-20.0))
                    .map_err(|e| e.to_string())?;
            let p = p.pdc.value();
            ensure(p > prev, || {
                format!("pa_pdc not increasing at {f} GHz: {prev} then {p}")
            })?;
            prev = p;
        }
        for &f in &[18.0, 28.0, 60.0, 94.0, 140.0, 243.0] {
            for &(lo, hi) in &[(-20.0, -10.0), (-15.0, -5.0), (-10.0, 0.0)] {
                let a = m
                    .mixer
                    .mixer_pdc(ghz(f), dbm(lo))
                    .map_err(|e| e.to_string())?
                    .pdc
                    .value();
                let b = m
                    .mixer
                    .mixer_pdc(ghz(f), dbm(hi))
                    .map_err(|e| e.to_string())?
                    .pdc
                    .value();
                let ratio = b / a;
                // exact up to the last bit of the two roundings involved
                ensure((ratio - 10.0).abs() <= 4.0 * f64::EPSILON * 10.0, || {
                    format!("{f} GHz, {lo}->{hi} dBm: ratio {ratio}")
                })?;
            }
        }
        Ok(())
    };
    report(10, "monotonicity and linearity", run());
}

fn pipeline(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    let bin = env!("CARGO_BIN_EXE_wnoc-power");
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr))
        })
    };
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    for c in ["pa", "osc", "mixer"] {
        let input = data_path(&format!("{c}.csv"))
            .to_string_lossy()
            .into_owned();
        run(&[
            "fit",
            "--component",
            c,
            "--input",
            &input,
            "--output",
            &p(&format!("{c}.json")),
        ])?;
    }
    run(&[
        "breakdown",
        "--pa",
        &p("pa.json"),
        "--mixer",
        &p("mixer.json"),
        "--osc",
        &p("osc.json"),
        "--output",
        &p("breakdown.csv"),
    ])?;
    run(&[
        "plot",
        "--breakdown",
        &p("breakdown.csv"),
        "--output",
        &p("breakdown.svg"),
    ])?;
    run(&["plot", "--model", &p("osc.json"), "--output", &p("osc.svg")])?;
    [
        "pa.json",
        "osc.json",
        "mixer.json",
        "breakdown.csv",
        "breakdown.svg",
        "osc.svg",
    ]
    .iter()
    .map(|n| std::fs::read(dir.join(n)).map_err(|e| e.to_string()))
    .collect()
}

#[test]
fn criterion_11_cli_determinism() {
    let run = || {
        let start = Instant::now();
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let first = pipeline(a.path())?;
        let second = pipeline(b.path())?;
        ensure(first == second, || "outputs differ between runs".into())?;
        ensure(first.iter().all(|f| !f.is_empty()), || {
            "empty output".into()
        })?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(10), || format!("took {t:?}"))
    };
    report(11, "CLI pipeline determinism", run());
}
