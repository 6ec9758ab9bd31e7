//! Browser bindings for the demo page in `www/`. Each export takes plain
//! strings and numbers and returns a JSON string; errors come back as a
//! string message.

use serde::Serialize;
use serde_json::json;
use toeplitz_core::builder::{assemble_eta, refine_growth, toeplitz_report};
use toeplitz_core::format;
use toeplitz_core::period::{build_periodic_structure, period_table, PeriodError};
use toeplitz_core::sequence::materialize;
use toeplitz_core::Odometer;
use wasm_bindgen::prelude::*;

/// Widest window the page asks for; keeps the tab responsive.
const MAX_RADIUS: u32 = 1 << 14;
const MAX_STEPS: u32 = 4096;

fn to_json(v: impl Serialize) -> String {
    serde_json::to_string(&v).expect("values serialize")
}

fn check(radius: u32, period_cap: u32) -> Result<(), String> {
    if radius > MAX_RADIUS {
        return Err(format!("radius is limited to {MAX_RADIUS} here"));
    }
    if period_cap == 0 || radius < 2 * period_cap {
        return Err("radius must be at least twice the period cap".into());
    }
    Ok(())
}

/// Skeleton rows for `p = 1..=period_cap`, a window of the sequence around
/// 0 and the periodic structure when one is found.
pub fn skeletons(definition: &str, period_cap: u32, radius: u32) -> Result<String, String> {
    check(radius, period_cap)?;
    let x = format::parse(definition).map_err(|e| e.to_string())?;
    let rows = period_table(&x, period_cap as usize, radius as u64).map_err(|e| e.to_string())?;
    let candidates: Vec<usize> = (1..=period_cap as usize).collect();
    let structure = match build_periodic_structure(&x, &candidates, radius as u64) {
        Ok(ps) => json!({ "periods": ps.periods(), "entries": ps.entries }),
        Err(PeriodError::NoGrowthEvidence(_)) => json!(null),
        Err(e) => return Err(e.to_string()),
    };
    let preview = 2 * period_cap.min(64) as i64;
    Ok(to_json(json!({
        "window": { "lo": -preview, "symbols": x.render(-preview, preview) },
        "rows": rows,
        "structure": structure,
    })))
}

/// Runs the construction and returns its levels, the certified window of
/// `η` and `η` as a definition file.
pub fn construct(definition: &str, period_cap: u32, radius: u32) -> Result<String, String> {
    check(radius, period_cap)?;
    let x = format::parse(definition).map_err(|e| e.to_string())?;
    let candidates: Vec<usize> = (1..=period_cap as usize).collect();
    let ps = build_periodic_structure(&x, &candidates, radius as u64).map_err(|e| e.to_string())?;
    let chain = refine_growth(&ps).map_err(|e| e.to_string())?;
    let c = assemble_eta(&x, &chain, radius as u64).map_err(|e| e.to_string())?;
    let report = toeplitz_report(&x, &c, radius as u64).map_err(|e| e.to_string())?;
    let (lo, hi) = c.certified;
    let window = materialize(&c.eta, lo, hi).map_err(|e| e.to_string())?;
    let symbols: String = window.values().iter().map(|&s| x.alphabet().label(s)).collect();
    let definition = format::to_string(&c.eta).map_err(|e| e.to_string())?;
    Ok(to_json(json!({
        "levels": c.levels,
        "verdicts": c.verdicts,
        "toeplitz_on_certified": report.toeplitz_on_certified(),
        "eta": { "lo": lo, "hi": hi, "symbols": symbols },
        "definition": definition,
    })))
}

/// `steps` applications of `g` starting from `start`, which is a coordinate
/// vector or an integer.
pub fn orbit(moduli: &str, start: &str, steps: u32) -> Result<String, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let moduli = moduli
        .split(',')
        .map(|m| m.trim().parse::<u64>().map_err(|_| format!("bad modulus `{}`", m.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    let od = Odometer::from_moduli(moduli).map_err(|e| e.to_string())?;
    let mut a = od.parse(start).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(a.coords());
    for _ in 0..steps {
        a = a.step();
        out.push(a.coords());
    }
    Ok(to_json(json!({ "moduli": od.moduli(), "orbit": out })))
}

#[wasm_bindgen(js_name = skeletons)]
pub fn skeletons_js(definition: &str, period_cap: u32, radius: u32) -> Result<String, JsError> {
    skeletons(definition, period_cap, radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = construct)]
pub fn construct_js(definition: &str, period_cap: u32, radius: u32) -> Result<String, JsError> {
    construct(definition, period_cap, radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = orbit)]
pub fn orbit_js(moduli: &str, start: &str, steps: u32) -> Result<String, JsError> {
    orbit(moduli, start, steps).map_err(|e| JsError::new(&e))
}
