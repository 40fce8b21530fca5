use blowup_web::{path_json, probability_json, thresholds_json};
use serde_json::Value;

const EQUAL: &str = include_str!("../../../configs/equal.cfg");

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn thresholds_for_the_equal_case() {
    let j = parse(&thresholds_json(EQUAL).unwrap());
    let up = j["constants"]["theta_upper"].as_f64().unwrap();
    assert!((up - 8.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!(j["upper_reason"].is_null());
}

#[test]
fn path_series_are_thinned_and_aligned() {
    let j = parse(&path_json(EQUAL, 20240601, 0).unwrap());
    let n = j["t"].as_array().unwrap().len();
    assert!(n <= 1500 && n > 100);
    assert_eq!(j["lower"].as_array().unwrap().len(), n);
    assert_eq!(j["upper"].as_array().unwrap().len(), n);
    assert_eq!(j["w"][0].as_array().unwrap().len(), n);
    let lo = j["tau_lower"].as_f64().unwrap();
    assert!(lo > 0.0 && lo < 4.0);
}

#[test]
fn two_noise_configs_are_drawn_too() {
    let text = include_str!("../../../configs/two_noise.cfg");
    let j = parse(&path_json(text, 3, 1).unwrap());
    assert_eq!(j["w"].as_array().unwrap().len(), 2);
}

#[test]
fn probability_curve_is_monotone_and_marks_the_threshold() {
    let j = parse(&probability_json(EQUAL, 1).unwrap());
    let p = j["p_infinite"].as_f64().unwrap();
    assert!((p - 0.991469).abs() < 1e-6);
    let ys: Vec<f64> = j["curve"].as_array().unwrap().iter().map(|v| v[1].as_f64().unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[0] <= w[1]));
    assert!(probability_json(EQUAL, 2).is_err());
}
