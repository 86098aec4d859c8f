//! Browser bindings for three operations: classifying an `A_2` point, the
//! region map over the `(α1, α2)` plane, and the pentagon wall-cross.
//!
//! Every export returns a JSON string; failures come back as `{"error": ...}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use wallx::io::StabilityJson;
use wallx::scalar::{parse_q, Q};
use wallx::stability_engine::{extract_spectrum, wall_cross, StabilityData};
use wallx::vstab_wcf::{a2_classify, a2_hn_oracle, grid_points, region_point, summarize, type_set_label, A2Point, OracleVerdict};
use wallx::WallxError;

fn point_from(text: &str) -> Result<A2Point, WallxError> {
    let v: Vec<Q> = text.split(',').map(parse_q).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a1, a2] => Ok(A2Point::from_alphas(a1.clone(), a2.clone())),
        [t01, t12, t02] => Ok(A2Point::new(t01.clone(), t12.clone(), t02.clone())),
        _ => Err(WallxError::Parse(format!("expected α1,α2 or θ01,θ12,θ02, got {text:?}"))),
    }
}

fn error(e: WallxError) -> Value {
    json!({ "error": e.to_string() })
}

/// `text` is either `α1,α2` or `θ01,θ12,θ02`.
pub fn classify_value(text: &str) -> Value {
    let p = match point_from(text) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let c = match a2_classify(&p) {
        Ok(c) => c,
        Err(e) => return error(e),
    };
    let hn: Vec<Value> = c
        .types
        .iter()
        .map(|t| {
            let OracleVerdict::Pass { sequences } = a2_hn_oracle(&p, &t.semistable()) else {
                unreachable!("classified types pass the oracle");
            };
            let lines: Vec<String> = sequences
                .iter()
                .map(|s| {
                    let f: Vec<String> = s.factors.iter().map(|(x, t)| format!("{x}@{t}")).collect();
                    format!("HN({}) = [{}]", s.object, f.join(", "))
                })
                .collect();
            json!({ "type": t.to_string(), "hn": lines })
        })
        .collect();
    json!({
        "point": p.to_string(),
        "types": type_set_label(&c.types),
        "coamoeba": format!("{:?}", c.coamoeba),
        "hn": hn,
    })
}

/// Row-major labels over `[-3, 3]²`, α2 increasing along a row; `""` on dividing lines.
pub fn region_value(grid: usize) -> Value {
    let (lo, hi) = (Q::from_integer((-3).into()), Q::from_integer(3.into()));
    let points: Vec<_> = grid_points(grid, &lo, &hi).into_iter().map(|(a, b)| region_point(a, b)).collect();
    let s = summarize(&points);
    let labels: Vec<String> = points
        .iter()
        .map(|p| match &p.types {
            Some(t) if p.coamoeba.is_member() => type_set_label(t),
            Some(t) => format!("~{}", type_set_label(t)),
            None => String::new(),
        })
        .collect();
    json!({ "grid": grid, "lo": -3, "hi": 3, "labels": labels, "disagreements": s.disagreements, "regions": s.regions })
}

fn pentagon_input(height: usize) -> String {
    format!(
        r#"{{
            "pairing": [[0, 1], [-1, 0]],
            "height": {height},
            "charge": [{{"gamma": [1, 0], "re": 0, "im": 1}}, {{"gamma": [0, 1], "re": 1, "im": 0}}],
            "rays": [{{"gamma": [1, 0], "omega": 1}}, {{"gamma": [0, 1], "omega": 1}}],
            "new_charge": [{{"gamma": [1, 0], "re": 1, "im": 0}}, {{"gamma": [0, 1], "re": 0, "im": 1}}]
        }}"#
    )
}

fn rays_value(d: &StabilityData) -> Result<Value, WallxError> {
    let s = extract_spectrum(d, None)?;
    let rays: Vec<Value> = s
        .rays
        .iter()
        .map(|r| {
            let terms: Vec<String> = r.terms.iter().map(|(g, c)| format!("{:?}: {c}", g.vec)).collect();
            json!({ "direction": r.direction.to_string(), "terms": terms })
        })
        .collect();
    let omega: Vec<String> =
        s.omega.iter().flatten().map(|(g, v)| format!("Ω{:?} = {v}", g.vec)).collect();
    Ok(json!({ "rays": rays, "omega": omega }))
}

/// Cross the pentagon wall at the given height.
pub fn pentagon_value(height: usize) -> Value {
    let run = || -> Result<Value, WallxError> {
        let input = StabilityJson::parse(&pentagon_input(height))?.build()?;
        let new_charge = input.new_charge.expect("pentagon input has a new charge");
        let after = wall_cross(&input.data, &new_charge)?;
        Ok(json!({ "height": height, "before": rays_value(&input.data)?, "after": rays_value(&after)? }))
    };
    run().unwrap_or_else(error)
}

#[wasm_bindgen]
pub fn classify_point(text: &str) -> String {
    classify_value(text).to_string()
}

#[wasm_bindgen]
pub fn region_grid(grid: usize) -> String {
    region_value(grid.clamp(1, 200)).to_string()
}

#[wasm_bindgen]
pub fn pentagon(height: usize) -> String {
    pentagon_value(height.clamp(1, 6)).to_string()
}
