use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use pathspin_web::{entanglement_curve, evaluate, violation_scan};

#[test]
fn evaluate_reaches_tsirelson_at_optimal_settings() {
    let r = evaluate(FRAC_1_SQRT_2, PI, FRAC_PI_2, FRAC_PI_4, 1.25 * PI, 0.75 * PI).unwrap();
    assert!((r.s - 2.0 * SQRT_2).abs() < 1e-12);
    assert!(r.violated);
    let product = evaluate(1.0, 0.0, FRAC_PI_2, FRAC_PI_4, 1.25 * PI, 0.75 * PI).unwrap();
    assert!((product.s - SQRT_2).abs() < 1e-12);
}

#[test]
fn evaluate_rejects_bad_amplitude() {
    assert!(evaluate(1.2, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn curve_endpoints_are_classical() {
    let curve = entanglement_curve(PI, 11, false).unwrap();
    assert_eq!(curve.len(), 11);
    assert!((curve[0].s_max - 2.0).abs() < 1e-6);
    assert!((curve[10].s_max - 2.0).abs() < 1e-6);
    for p in &curve {
        let exact = 2.0 * (1.0 + 4.0 * p.a * p.a * (1.0 - p.a * p.a)).sqrt();
        assert!((p.s_max - exact).abs() < 1e-4);
    }
    assert!(entanglement_curve(PI, 1, false).is_err());
}

#[test]
fn scan_separates_quantum_from_hidden_variables() {
    let scan = violation_scan(0.3, 3, 20_000, 20, 1).unwrap();
    assert_eq!(scan[0].qm_fraction, 1.0);
    assert!(scan.iter().all(|p| p.lhv_fraction == 0.0));
    assert!(scan.windows(2).all(|w| w[0].qm_fraction >= w[1].qm_fraction));
    assert_eq!(scan, violation_scan(0.3, 3, 20_000, 20, 1).unwrap());
    assert!(violation_scan(0.0, 3, 10, 1, 1).is_err());
}

#[test]
fn results_serialize_to_json() {
    let r = evaluate(FRAC_1_SQRT_2, PI, 0.1, 0.2, 0.3, 0.4).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["s"].as_f64().unwrap(), r.s);
}
