//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every entry point takes plain strings and returns a JSON string, so the
//! page needs no generated bindings beyond `wasm-bindgen`'s own glue. The
//! same functions are usable natively.

use fatk_core::encodings::{parse_sugared_sequent, parse_sugared_term};
use fatk_core::reduction::{normalize, Fuel, TraceStatus};
use fatk_core::semantics::{is_valid, AtomicBase, Flavor, WitnessBudget};
use fatk_core::syntax::{parse_open_term, Atom};
use fatk_core::typing::{check, synthesize};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(message: impl std::fmt::Display) -> Value {
    json!({ "ok": false, "error": message.to_string() })
}

/// Normal-order reduction of `term` with every intermediate step.
#[wasm_bindgen]
pub fn normalize_trace(term: &str, fuel: u32) -> String {
    normalize_value(term, fuel).to_string()
}

pub fn normalize_value(term: &str, fuel: u32) -> Value {
    let t = match parse_sugared_term(term) {
        Ok(t) => t,
        Err(e) => return error(e),
    };
    let fuel = match Fuel::new(u64::from(fuel)) {
        Ok(f) => f,
        Err(_) => return error("fuel must be positive"),
    };
    let trace = normalize(&t, fuel);
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| json!({ "rule": s.rule, "path": s.path, "term": s.result.to_string() }))
        .collect();
    json!({
        "ok": true,
        "start": t.to_string(),
        "steps": steps,
        "normalized": trace.status == TraceStatus::Normalized,
        "result": trace.last().to_string(),
    })
}

/// Checks `Γ |- t : A`, or synthesizes a formula for `Γ |- t`.
#[wasm_bindgen]
pub fn check_or_infer(input: &str) -> String {
    check_value(input).to_string()
}

pub fn check_value(input: &str) -> Value {
    if let Ok(seq) = parse_sugared_sequent(input) {
        return match check(&seq.context, &seq.term, &seq.formula) {
            Ok(d) => json!({
                "ok": true,
                "mode": "check",
                "derivable": true,
                "formula": seq.formula.to_string(),
                "derivation": d.render(),
            }),
            Err(e) => {
                json!({ "ok": true, "mode": "check", "derivable": false, "reason": e.to_string() })
            }
        };
    }
    let (ctx, term) = match parse_open_term(input) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    match synthesize(&ctx, &term) {
        Ok(d) => json!({
            "ok": true,
            "mode": "infer",
            "derivable": true,
            "formula": d.formula().to_string(),
            "derivation": d.render(),
        }),
        Err(e) => {
            json!({ "ok": true, "mode": "infer", "derivable": false, "reason": e.to_string() })
        }
    }
}

/// Validity verdict for `Γ |- t : A` against the comma-separated `base`.
#[wasm_bindgen]
pub fn validity(input: &str, flavor: &str, base: &str, size: u32, depth: u32) -> String {
    validity_value(input, flavor, base, size, depth).to_string()
}

pub fn validity_value(input: &str, flavor: &str, base: &str, size: u32, depth: u32) -> Value {
    let seq = match parse_sugared_sequent(input) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let flavor: Flavor = match flavor.parse() {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    let mut atoms = Vec::new();
    for name in base.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        match Atom::try_new(name) {
            Some(a) => atoms.push(a),
            None => return error(format!("`{name}` is not an atom name")),
        }
    }
    let budget = WitnessBudget {
        term_size_bound: size as usize,
        unfold_depth: depth as usize,
        ..WitnessBudget::default()
    };
    match is_valid(
        &seq.term,
        &seq.context,
        &seq.formula,
        flavor,
        &AtomicBase::new(atoms),
        &budget,
    ) {
        Ok(v) => json!({ "ok": true, "status": v.status, "summary": v.summary(), "verdict": v }),
        Err(e) => error(e),
    }
}
