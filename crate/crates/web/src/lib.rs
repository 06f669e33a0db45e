//! Browser bindings: three operations, each taking plain strings and
//! returning a JSON document (or DOT text for trees).

use dydy::atlas::{Atlas, TreeKind};
use dydy::dynamics::{classify_parameter as classify_t, classify_point_orbit, OrbitOptions};
use dydy::poly::FamilyMember;
use dydy::Rational2;
use wasm_bindgen::prelude::*;

/// Iteration budget for the page; keeps each call well under a second.
const MAX_ITERS: usize = 2_000;
const MAX_TREE_DEPTH: i64 = 10;

fn rational(label: &str, s: &str) -> Result<Rational2, String> {
    s.parse().map_err(|e| format!("{label}: {e}"))
}

fn options() -> OrbitOptions {
    OrbitOptions {
        max_iters: MAX_ITERS,
        ..OrbitOptions::default()
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map_err(|e| e.to_string())
}

/// Is the critical orbit of `f_t` bounded?
#[wasm_bindgen(js_name = classifyParameter)]
pub fn classify_parameter(t: &str) -> Result<String, String> {
    json(&classify_t(&rational("t", t)?, &options()))
}

/// Orbit of `z` under `f_t`.
#[wasm_bindgen(js_name = classifyPoint)]
pub fn classify_point(t: &str, z: &str) -> Result<String, String> {
    let f = FamilyMember::new(rational("t", t)?);
    json(&classify_point_orbit(&f, &rational("z", z)?, &options()))
}

/// The classified Mandelbrot (`"mandel"`) or Julia (`"julia"`) tree as DOT
/// or indented text.
#[wasm_bindgen(js_name = classifyTree)]
pub fn classify_tree(kind: &str, depth: i32, dot: bool) -> Result<String, String> {
    let kind = match kind {
        "mandel" => TreeKind::Mandelbrot,
        "julia" => TreeKind::Julia,
        other => return Err(format!("unknown tree kind {other:?}")),
    };
    let depth = i64::from(depth);
    if !(1..=MAX_TREE_DEPTH).contains(&depth) {
        return Err(format!("depth must be between 1 and {MAX_TREE_DEPTH}"));
    }
    let tree = Atlas::with_budget(1, MAX_ITERS, dydy::dyadic::DEFAULT_PRECISION)
        .tree(kind, depth)
        .map_err(|e| e.to_string())?;
    Ok(if dot { tree.to_dot() } else { tree.to_text() })
}
