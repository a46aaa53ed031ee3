use rispaces_wasm::{cesaro_curve_json, dist_schedule_json, rearrange_curve_json};
use serde_json::Value;

const STEP: &str = r#"{"domain":"halfline","pieces":[{"lo":0,"hi":1,"kind":"const","params":[1]},
    {"lo":1,"hi":2,"kind":"const","params":[3]}],"tail":{"kind":"const","params":["1/2"]}}"#;

#[test]
fn rearrangement_curve_is_non_increasing() {
    let v: Value = serde_json::from_str(&rearrange_curve_json(STEP, 50).unwrap()).unwrap();
    assert_eq!(v["exact"], true);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 50);
    let star: Vec<f64> = pts.iter().map(|p| p[2].as_f64().unwrap()).collect();
    assert!(star.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(star[0], 3.0);
}

#[test]
fn cesaro_curve_matches_the_closed_form() {
    let f = r#"{"domain":"halfline","pieces":[{"lo":0,"hi":1,"kind":"const","params":[1]}]}"#;
    let v: Value = serde_json::from_str(&cesaro_curve_json(f, 7).unwrap()).unwrap();
    for p in v["points"].as_array().unwrap() {
        let t = p[0].as_f64().unwrap();
        let c = p[2].as_f64().unwrap();
        assert!((c - (1.0f64).min(1.0 / t)).abs() < 1e-12, "{t}: {c}");
    }
}

#[test]
fn dist_schedule_reports_path_and_value() {
    let space = r#"{"kind":"sum_lp_linf","p":2,"domain":"halfline"}"#;
    let v: Value = serde_json::from_str(&dist_schedule_json(STEP, space).unwrap()).unwrap();
    assert_eq!(v["path"], "deJonge-closed-form");
    assert!((v["dist"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let m = r#"{"kind":"marcinkiewicz","domain":"halfline","phi":{"preset":"sqrt"}}"#;
    let f = r#"{"domain":"halfline","pieces":[{"lo":0,"hi":1,"kind":"pow","params":["1/2","-1/2"]}]}"#;
    let v: Value = serde_json::from_str(&dist_schedule_json(f, m).unwrap()).unwrap();
    assert_eq!(v["path"], "limit-formula");
    assert!((v["dist"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(!v["schedule"].as_array().unwrap().is_empty());
}

#[test]
fn errors_are_messages() {
    assert!(dist_schedule_json(STEP, r#"{"kind":"lp","p":2,"domain":"unit"}"#).is_err());
    assert!(rearrange_curve_json("{", 10).unwrap_err().contains("line 1"));
}
