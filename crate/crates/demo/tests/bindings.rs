use fstring_demo::{content_curve_values, delta_curve_values, zeta_json};

#[test]
fn a_string_content_curve_settles_at_the_constant() {
    let v = content_curve_values(r#"{"kind":"a_string","a":1.0}"#, 0.5, 1e-3, 0.5, 30).unwrap();
    assert_eq!(v.len(), 90);
    let last = &v[v.len() - 3..];
    assert!((last[1] / 2f64.powf(1.5) - 1.0).abs() < 0.01);
    assert!((last[2] / 2f64.powf(1.5) - 1.0).abs() < 0.01);
}

#[test]
fn delta_curve_for_a_string() {
    let v = delta_curve_values(r#"{"kind":"a_string","a":1.0}"#, 0.5, 10.0, 4.0, 10).unwrap();
    assert_eq!(v.len(), 20);
    assert!(v.chunks(2).all(|p| p[1] > 0.5 && p[1] < 2.5));
}

#[test]
fn zeta_summary_is_json() {
    let text = zeta_json(0.5).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["zeta_d"].as_f64().unwrap() + 1.4603545).abs() < 1e-6);
    assert!(zeta_json(2.0).is_err());
}

#[test]
fn bad_specs_are_reported() {
    assert!(content_curve_values("{", 0.5, 1e-3, 0.5, 20)
        .unwrap_err()
        .contains("bad string spec"));
}
