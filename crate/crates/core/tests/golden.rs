//! Checks against values produced by `tests/oracle/oracle.py`.

use approx::assert_relative_eq;
use serde_json::Value;

use dustlink::*;

fn golden() -> Value {
    let text = include_str!("oracle/golden.json");
    serde_json::from_str(text).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn triple(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [f(&a[0]), f(&a[1]), f(&a[2])]
}

#[test]
fn humidity_polynomials() {
    let g = golden();
    for h in ["0", "60", "100"] {
        let want = g["humidity"][h].as_array().unwrap();
        let got = humidity_adjusted_permittivity(h.parse().unwrap()).unwrap();
        assert!((got.eps1 - f(&want[0])).abs() <= 1e-9, "eps1 at {h}%");
        assert!((got.eps2 - f(&want[1])).abs() <= 1e-9, "eps2 at {h}%");
    }
}

#[test]
fn mie_coefficients_every_reading() {
    let g = golden();
    for level in ["h0", "h60", "h100"] {
        let entry = &g["mie"][level];
        let e = entry["eps"].as_array().unwrap();
        let eps = ComplexPermittivity::new(f(&e[0]), f(&e[1])).unwrap();
        for (key, opts) in [
            ("default", MieOptions::default()),
            ("c2_literal", MieOptions { c2_literal: true, c3_literal: false }),
            ("c3_literal", MieOptions { c2_literal: false, c3_literal: true }),
            ("both_literal", MieOptions { c2_literal: true, c3_literal: true }),
        ] {
            let want = triple(&entry[key]);
            let c = mie_coefficients_with(eps, opts);
            for (got, want) in [c.c1, c.c2, c.c3].into_iter().zip(want) {
                assert_relative_eq!(got, want, max_relative = 1e-12);
            }
        }
    }
}

#[test]
fn closed_form_examples() {
    let g = golden();
    let mix = looyenga_mix(&[
        MineralComponent::new(ComplexPermittivity::new(2.0, 0.0).unwrap(), 0.5).unwrap(),
        MineralComponent::new(ComplexPermittivity::new(8.0, 0.0).unwrap(), 0.5).unwrap(),
    ])
    .unwrap();
    assert_relative_eq!(mix.eps1, f(&g["looyenga_2_8"]), max_relative = 1e-12);

    let p = StormProfile {
        height_m: 2.0,
        ..StormProfile::new(10.0, 0.0).unwrap()
    };
    assert_relative_eq!(visibility_at_height(&p), f(&g["visibility_10km_2m"]), max_relative = 1e-12);

    let p = StormProfile::new(0.01, 100e-6).unwrap();
    let eps = ComplexPermittivity::new(6.3485, 0.0929).unwrap();
    // Only C1 enters the oracle; higher orders are below 1e-5 relative here.
    assert_relative_eq!(
        specific_attenuation(&p, 28.0, eps),
        f(&g["attenuation_100um_28ghz_10m"]),
        max_relative = 1e-4
    );
}

#[test]
fn link_chain() {
    let g = golden();
    assert_relative_eq!(
        system_noise_temperature(&RadioConfig::dsrc()),
        f(&g["system_temperature_6db"]),
        max_relative = 1e-12
    );
    for band in Band::ALL {
        assert!((noise_power_dbm(&band.radio()) - f(&g["noise_power_dbm"][band.name()])).abs() < 1e-9);
        for scenario in [Scenario::urban(), Scenario::highway()] {
            let key = format!("{}/{}", band.name(), scenario.kind);
            let want = &g["links_390m"][key.as_str()];
            let model = LinkModel::preset(band, scenario, 390.0).unwrap();
            let base = model.baseline_loss_db();
            assert!((base - f(&want["baseline_loss_db"])).abs() < 1e-9, "{key}");
            let margin = link_margin(&model.radio, base);
            assert!((margin - f(&want["clear_air_margin_db"])).abs() < 1e-9, "{key}");
            assert!((model.max_allowed_excess_loss() - f(&want["max_allowed_excess_db"])).abs() < 1e-9, "{key}");
        }
    }
}
