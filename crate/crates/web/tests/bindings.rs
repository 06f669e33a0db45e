use dydy_web::{classify_parameter, classify_point, classify_tree};
use serde_json::Value;

#[test]
fn parameter_documents() {
    let v: Value = serde_json::from_str(&classify_parameter("2").unwrap()).unwrap();
    assert_eq!(v["label"], "in_mandelbrot");
    let v: Value = serde_json::from_str(&classify_parameter("33").unwrap()).unwrap();
    assert_eq!(v["label"], "not_in_mandelbrot");
    assert!(classify_parameter("1/0").is_err());
}

#[test]
fn point_documents() {
    let v: Value = serde_json::from_str(&classify_point("1", "19/2").unwrap()).unwrap();
    assert_eq!(v["class"]["kind"], "trapped_q2");
    let v: Value = serde_json::from_str(&classify_point("1", "1").unwrap()).unwrap();
    assert_eq!(v["class"]["kind"], "preperiodic");
    assert!(classify_point("1", "x").unwrap_err().starts_with("z:"));
}

#[test]
fn trees() {
    let dot = classify_tree("julia", 5, true).unwrap();
    assert!(dot.starts_with("digraph julia {"));
    assert!(dot.contains("label=\"19/2:4\""));
    let text = classify_tree("mandel", 4, false).unwrap();
    assert!(text.contains("3:2 Escape"));
    assert!(classify_tree("mandel", 0, false).is_err());
    assert!(classify_tree("mandel", 11, false).is_err());
    assert!(classify_tree("other", 3, false).is_err());
}
