//! Browser front end for `torsion-core`. Every export takes plain numbers or
//! strings and returns a JSON document; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use torsion_core::bounds::{combined_report, dimension_split, Provenance};
use torsion_core::field::Field;
use torsion_core::pfister::{canonical_relation, pfister_form};
use torsion_core::poly::parse_with_inferred_context;
use torsion_core::twisting::is_twisting_type;

/// Largest `N` the bounds explorer tabulates.
pub const MAX_EXPLORER_N: u64 = 400;
/// Largest `n` the relation viewer expands.
pub const MAX_VIEWER_N: usize = 6;
const MAX_INPUT_LEN: usize = 20_000;

fn render(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn code(p: &Provenance) -> &'static str {
    match p {
        Provenance::LogCutoff => "L",
        Provenance::SplitCutoff => "S",
        Provenance::PrimePower => "P",
    }
}

/// One row per degree `4 <= d <= N+1`: which `m` are certified divisors and
/// by which rule, plus the size of the combined bound.
pub fn explore_bounds(n: u64, characteristic: u64) -> Result<Value, String> {
    if n > MAX_EXPLORER_N {
        return Err(format!("N is limited to {MAX_EXPLORER_N}"));
    }
    let split = dimension_split(n).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut max_m = 0;
    for d in 4..=n + 1 {
        let r = combined_report(n, d, characteristic).map_err(|e| e.to_string())?;
        let cells: Vec<Value> = r
            .divisors
            .iter()
            .map(|dv| {
                max_m = max_m.max(dv.m);
                let tags: String = dv.provenance.iter().map(code).collect();
                json!({ "m": dv.m, "tags": tags })
            })
            .collect();
        rows.push(json!({
            "d": d,
            "divisors": cells,
            "combined": r.combined.to_string(),
            "combined_digits": r.combined.to_string().len(),
            "upper_digits": r.upper.to_string().len(),
        }));
    }
    Ok(json!({
        "N": n,
        "n": split.n,
        "r": split.r,
        "char": characteristic,
        "max_m": max_m,
        "legend": { "L": "log-cutoff", "S": "split-cutoff", "P": "prime-power" },
        "rows": rows,
    }))
}

#[wasm_bindgen]
pub fn bounds_explorer(n: u32, characteristic: u32) -> String {
    render(explore_bounds(n as u64, characteristic as u64))
}

/// Full report for a single `(N, d)`.
#[wasm_bindgen]
pub fn bounds_report(n: u32, d: u32, characteristic: u32) -> String {
    render(
        combined_report(n as u64, d as u64, characteristic as u64)
            .map_err(|e| e.to_string())
            .map(|r| {
                let mut v = serde_json::to_value(&r).expect("serializable");
                v["text"] = json!(r.to_string());
                v
            }),
    )
}

/// The Fermat-Pfister form and the matching universal relation, with the
/// Steinberg witnesses checked.
pub fn view_relation(m: u32, n: usize) -> Result<Value, String> {
    if !(1..=MAX_VIEWER_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_VIEWER_N}"));
    }
    let form = pfister_form(m, n).map_err(|e| e.to_string())?;
    let rel = canonical_relation(m, n).map_err(|e| e.to_string())?;
    let checks = rel.verify_witnesses().map_err(|e| e.to_string())?;
    let verified = checks.iter().filter(|c| c.is_pass()).count();
    Ok(json!({
        "m": m,
        "n": n,
        "form": form.body.to_string(),
        "coefficients": form.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "relation": rel.to_string(),
        "entries": rel.rhs().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "witnesses": checks.len(),
        "verified": verified,
    }))
}

#[wasm_bindgen]
pub fn relation_viewer(m: u32, n: u32) -> String {
    render(view_relation(m, n as usize))
}

/// Runs the twisting-type checker on user input; `units` is a comma
/// separated list of names treated as unit parameters.
pub fn check_twisting(
    poly: &str,
    m: u32,
    units_are_powers: bool,
    units: &str,
) -> Result<Value, String> {
    if poly.len() > MAX_INPUT_LEN {
        return Err("input too long".into());
    }
    let units: Vec<&str> = units
        .split(',')
        .map(str::trim)
        .filter(|u| !u.is_empty())
        .collect();
    let p =
        parse_with_inferred_context(poly, Field::Rationals, &units).map_err(|e| e.to_string())?;
    let report = is_twisting_type(&p, m, units_are_powers, "x0").map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&report).expect("serializable");
    v["text"] = json!(report.to_string());
    Ok(v)
}

#[wasm_bindgen]
pub fn twisting_checker(poly: &str, m: u32, units_are_powers: bool, units: &str) -> String {
    render(check_twisting(poly, m, units_are_powers, units))
}
