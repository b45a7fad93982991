//! User-defined geometries from JSON chart data.
//!
//! A geometry file lists charts; each chart gives a square matrix of
//! expressions (the projector family) and a partition-of-unity weight. Here
//! the tautological line family over the sphere is rebuilt from scratch with
//! rational weights 1 / (1 + |z|^4), and its total first Chern charge is
//! recovered. Malformed specs and pointwise non-projectors are rejected.

use lamina::chernweil::{
    integrate_invariant, ChernWeilError, CurvatureOptions, ExprGeometry, InvariantPolynomial,
};
use serde_json::{json, Value};

fn coord(axis: usize) -> Value {
    json!({"op": "coord", "axis": axis})
}

fn real(re: f64) -> Value {
    json!({"op": "const", "re": re})
}

fn imaginary_unit() -> Value {
    json!({"op": "const", "re": 0.0, "im": 1.0})
}

fn add(args: Vec<Value>) -> Value {
    json!({"op": "add", "args": args})
}

fn mul(args: Vec<Value>) -> Value {
    json!({"op": "mul", "args": args})
}

fn div(a: Value, b: Value) -> Value {
    json!({"op": "div", "a": a, "b": b})
}

fn conj(a: Value) -> Value {
    json!({"op": "conj", "a": a})
}

/// Rank-one projector onto span(v0, v1): entries v_i conj(v_j) / |v|^2.
fn span_projector(v0: &Value, v1: &Value) -> Vec<Vec<Value>> {
    let norm = add(vec![
        mul(vec![v0.clone(), conj(v0.clone())]),
        mul(vec![v1.clone(), conj(v1.clone())]),
    ]);
    let entry = |a: &Value, b: &Value| div(mul(vec![a.clone(), conj(b.clone())]), norm.clone());
    vec![
        vec![entry(v0, v0), entry(v0, v1)],
        vec![entry(v1, v0), entry(v1, v1)],
    ]
}

fn main() {
    // Chart 0 covers the sphere minus the north pole with coordinate
    // z = x0 + i x1; the fiber is span(1, z). Chart 1 covers the complement
    // with w = 1/z and fiber span(w, 1). Weights 1/(1 + |z|^4) and
    // 1/(1 + |w|^4) sum to one at every point of the sphere.
    let z = add(vec![coord(0), mul(vec![imaginary_unit(), coord(1)])]);
    let z4 = mul(vec![z.clone(), conj(z.clone()), z.clone(), conj(z.clone())]);
    let weight = div(real(1.0), add(vec![real(1.0), z4]));

    let chart0 = span_projector(&real(1.0), &z);
    let chart1 = span_projector(&z, &real(1.0)); // same expression, read as w

    let spec = json!({
        "dim": 2,
        "extent": 4.0,
        "resolution": 160,
        "charts": [
            {"projection": chart0, "weight": weight.clone()},
            {"projection": chart1, "weight": weight},
        ],
    });

    let geometry = ExprGeometry::from_json(&spec.to_string()).expect("well-formed spec");
    let options = CurvatureOptions::at_resolution(geometry.default_resolution());
    let report = integrate_invariant(
        &geometry,
        &InvariantPolynomial::ChernCharacter(1),
        &options,
        5e-3,
    )
    .expect("the charts are honest projectors");
    println!(
        "hand-built tautological family: integral = {:.6}, residual = {:.2e}",
        report.integral, report.residual
    );
    assert_eq!(report.nearest_integer, -1);
    assert!(report.pass);

    // Structural validation happens at parse time.
    let bad_dim = json!({"dim": 3, "resolution": 8, "charts": [{"projection": [[real(1.0)]]}]});
    let err = ExprGeometry::from_json(&bad_dim.to_string()).err().expect("dim 3 must fail");
    println!("\nrejected dim 3: {err}");

    let bad_axis = json!({
        "dim": 2,
        "resolution": 8,
        "charts": [{"projection": [[coord(5)]]}],
    });
    let err = ExprGeometry::from_json(&bad_axis.to_string())
        .err()
        .expect("axis 5 must fail");
    println!("rejected out-of-range axis: {err}");

    // Pointwise validation happens during integration: entries that parse
    // fine but fail the projector identity P^2 = P = P* are caught.
    let not_projector = json!({
        "dim": 2,
        "resolution": 8,
        "charts": [{"projection": [[coord(0)]]}],
    });
    let geometry = ExprGeometry::from_json(&not_projector.to_string()).expect("parses fine");
    let err = integrate_invariant(
        &geometry,
        &InvariantPolynomial::ChernCharacter(1),
        &CurvatureOptions::at_resolution(8),
        1e-3,
    )
    .unwrap_err();
    match err {
        ChernWeilError::ProjectionDefect { value, .. } => {
            println!("rejected non-projector chart: defect {value:.3}")
        }
        other => panic!("expected a projection defect, got {other}"),
    }
}
