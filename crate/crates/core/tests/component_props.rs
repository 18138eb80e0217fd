use proptest::prelude::*;
use wnoc_power::components::{
    compute_pae, mixer_cg, osc_dc_to_rf_eff, ComponentError, ComponentModel, MixerPowerModel,
    OscPowerModel, PaPowerModel,
};
use wnoc_power::regression::{Domain, ExponentialCurve, FitSummary, PiecewiseParabExpCurve};
use wnoc_power::units::{dbm_to_mw, FrequencyGhz, PowerDbm};

fn ghz(f: f64) -> FrequencyGhz {
    FrequencyGhz::new(f).unwrap()
}

fn dbm(p: f64) -> PowerDbm {
    PowerDbm::new(p).unwrap()
}

fn domain() -> Domain {
    Domain::new(10.0, 300.0).unwrap()
}

fn pa_model() -> impl Strategy<Value = PaPowerModel> {
    (0.05f64..0.6, -0.01f64..-1e-4).prop_map(|(a, b)| PaPowerModel {
        pae_curve: ExponentialCurve::new(a, b, domain()).unwrap(),
    })
}

fn mixer_model() -> impl Strategy<Value = MixerPowerModel> {
    (0.1f64..20.0, -0.03f64..0.0, -30.0f64..-10.0).prop_map(|(a, b, pif)| MixerPowerModel {
        eff_curve: ExponentialCurve::new(a, b, domain()).unwrap(),
        pif_in: dbm(pif),
    })
}

fn osc_model() -> OscPowerModel {
    // peak 0.12 at 42 GHz, continuous decay beyond
    let c2 = -7e-5;
    let c1 = -2.0 * c2 * 42.0;
    let c0 = 0.12 + c2 * 42.0 * 42.0;
    OscPowerModel {
        eff_curve: PiecewiseParabExpCurve::new(ghz(42.0), (c0, c1, c2), -0.012, domain()).unwrap(),
    }
}

proptest! {
    #[test]
    fn pa_power_inverts_pae(m in pa_model(), f in 10.0f64..300.0, p_in in -30.0f64..-1.0, gain in 0.5f64..20.0) {
        let p_out = p_in + gain;
        let q = m.pa_pdc(ghz(f), dbm(p_out), dbm(p_in)).unwrap();
        let pae = compute_pae(dbm_to_mw(dbm(p_out)), dbm_to_mw(dbm(p_in)), q.pdc).unwrap();
        let (want, _) = m.pae(ghz(f)).unwrap();
        prop_assert!(((pae - want) / want).abs() <= 1e-9);
    }

    #[test]
    fn pa_bypass_draws_nothing(m in pa_model(), f in 1.0f64..600.0, p in -30.0f64..10.0) {
        let q = m.pa_pdc(ghz(f), dbm(p), dbm(p));
        if let Ok(q) = q {
            prop_assert_eq!(q.pdc.value(), 0.0);
        }
    }

    #[test]
    fn pa_power_increases_with_frequency(m in pa_model(), f in 10.0f64..299.0, df in 0.01f64..100.0) {
        let g = (f + df).min(300.0);
        let a = m.pa_pdc(ghz(f), dbm(0.0), dbm(-20.0)).unwrap().pdc.value();
        let b = m.pa_pdc(ghz(g), dbm(0.0), dbm(-20.0)).unwrap().pdc.value();
        prop_assert!(b > a);
    }

    #[test]
    fn osc_efficiency_round_trip(f in 10.0f64..300.0, p_rf in -20.0f64..0.0) {
        let m = osc_model();
        let q = m.osc_pdc(ghz(f), dbm(p_rf)).unwrap();
        let eff = osc_dc_to_rf_eff(dbm_to_mw(dbm(p_rf)), q.pdc).unwrap();
        prop_assert!(((eff - q.figure) / q.figure).abs() <= 1e-12);
    }

    #[test]
    fn osc_power_lowest_at_peak(f in 10.0f64..300.0) {
        let m = osc_model();
        let at_peak = m.osc_pdc(ghz(42.0), dbm(-10.0)).unwrap().pdc.value();
        let here = m.osc_pdc(ghz(f), dbm(-10.0)).unwrap().pdc.value();
        prop_assert!(at_peak <= here);
    }

    #[test]
    fn osc_power_linear_in_output(f in 10.0f64..300.0, p in -20.0f64..-5.0) {
        let m = osc_model();
        let a = m.osc_pdc(ghz(f), dbm(p)).unwrap().pdc.value();
        let b = m.osc_pdc(ghz(f), dbm(p + 10.0)).unwrap().pdc.value();
        prop_assert!((b / a - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn mixer_gain_is_db_form_of_linear_gain(m in mixer_model(), p in -10.0f64..5.0) {
        let g = m.linear_gain(dbm(p));
        let cg = mixer_cg(dbm_to_mw(dbm(p)), dbm_to_mw(m.pif_in)).unwrap();
        prop_assert!((10.0 * g.log10() - cg).abs() <= 1e-9);
    }

    #[test]
    fn mixer_power_linear_in_output(m in mixer_model(), f in 10.0f64..300.0, p in -10.0f64..0.0) {
        let a = m.mixer_pdc(ghz(f), dbm(p)).unwrap().pdc.value();
        let b = m.mixer_pdc(ghz(f), dbm(p + 10.0)).unwrap().pdc.value();
        prop_assert!((b / a - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn model_files_round_trip(m in mixer_model(), p in pa_model()) {
        let fit = FitSummary { rmse: 0.1, r2: 0.9, n: 12 };
        for model in [ComponentModel::Mixer(m), ComponentModel::Pa(p), ComponentModel::Osc(osc_model())] {
            let text = serde_json::to_string(&model.to_file_with(fit)).unwrap();
            let back = ComponentModel::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
            prop_assert_eq!(back, model);
        }
    }
}

#[test]
fn pae_above_one_is_an_error_not_a_clamp() {
    let m = PaPowerModel {
        pae_curve: ExponentialCurve::new(2.0, -0.001, domain()).unwrap(),
    };
    assert!(matches!(
        m.pa_pdc(ghz(20.0), dbm(0.0), dbm(-10.0)),
        Err(ComponentError::EfficiencyOutOfRange { .. })
    ));
}

#[test]
fn wrong_component_is_rejected() {
    let fit = FitSummary {
        rmse: 0.0,
        r2: 1.0,
        n: 3,
    };
    let file = ComponentModel::Osc(osc_model()).to_file_with(fit);
    let model = ComponentModel::from_file(&file).unwrap();
    assert!(matches!(
        model.into_pa(),
        Err(ComponentError::WrongComponent {
            expected: "pa",
            found: "osc"
        })
    ));

    let mut json: serde_json::Value = serde_json::to_value(file).unwrap();
    json["component"] = "pa".into();
    let relabelled = serde_json::from_value(json).unwrap();
    assert_eq!(
        ComponentModel::from_file(&relabelled),
        Err(ComponentError::WrongCurveKind("pa"))
    );
}

#[test]
fn pa_query_example() {
    // PAE 0.2 everywhere: (1 − 0.01) / 0.2
    let m = PaPowerModel {
        pae_curve: ExponentialCurve::new(0.2, 0.0, domain()).unwrap(),
    };
    let q = m.pa_pdc(ghz(100.0), dbm(0.0), dbm(-20.0)).unwrap();
    assert!((q.pdc.value() - 4.95).abs() < 1e-12);
}
