//! Browser bindings for the sparse simulator. Everything runs on the
//! in-memory array backend; the SQLite store is not available under wasm.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qsparse::circuit::{grover_circuit, parse_circuit, superposition_circuit};
use qsparse::selector::select_backend;
use qsparse::sparse::{measure_probability, run_sparse};
use qsparse::state::{infidelity, BasisIndex, DropConfig, SparseBackend};

const MAX_DEMO_QUBITS: usize = 18;
const MAX_SEARCH_QUBITS: usize = 6;
const TOP_ENTRIES: usize = 16;

#[derive(Serialize)]
struct DropRow {
    r: usize,
    infidelity: f64,
    dropped_mass: f64,
    peak_support: usize,
}

#[derive(Serialize)]
struct GroverRow {
    iterations: usize,
    simulated: f64,
    analytic: f64,
}

#[derive(Serialize)]
struct Entry {
    ket: String,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Serialize)]
struct Simulation {
    n_qubits: usize,
    gates: usize,
    mixed_choice: String,
    support: usize,
    dropped_mass: f64,
    top: Vec<Entry>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Infidelity of the state-drop run against the exact run, for every `r` of
/// the `n`-qubit superposition benchmark.
pub fn drop_curve_rows(n: usize, limit: usize) -> Result<String, String> {
    if n == 0 || n > MAX_DEMO_QUBITS {
        return Err(format!("n must be between 1 and {MAX_DEMO_QUBITS}"));
    }
    let drop = DropConfig::with_limit(limit).map_err(err)?;
    let mut rows = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let c = superposition_circuit(n, r).map_err(err)?;
        let exact = run_sparse(&c, SparseBackend::Array, DropConfig::disabled()).map_err(err)?;
        let approx = run_sparse(&c, SparseBackend::Array, drop).map_err(err)?;
        rows.push(DropRow {
            r,
            infidelity: infidelity(&exact.final_state, &approx.final_state).map_err(err)?,
            dropped_mass: approx.dropped_mass,
            peak_support: exact.peak_support,
        });
    }
    serde_json::to_string(&rows).map_err(err)
}

/// Probability of the marked state after 0..=`max_iterations` Grover
/// iterations on an `r`-qubit search register.
pub fn grover_curve_rows(r: usize, max_iterations: usize) -> Result<String, String> {
    if r == 0 || r > MAX_SEARCH_QUBITS {
        return Err(format!("search size must be between 1 and {MAX_SEARCH_QUBITS}"));
    }
    let theta = 2f64.powf(-(r as f64) / 2.0).asin();
    let mut rows = Vec::with_capacity(max_iterations + 1);
    for t in 0..=max_iterations.min(32) {
        let c = grover_circuit(r, t).map_err(err)?;
        let search = c.register("search").unwrap_or_default().to_vec();
        let report = run_sparse(&c, SparseBackend::Array, DropConfig::disabled()).map_err(err)?;
        rows.push(GroverRow {
            iterations: t,
            simulated: measure_probability(&report.final_state, BasisIndex::ZERO, &search).map_err(err)?,
            analytic: ((2 * t + 1) as f64 * theta).sin().powi(2),
        });
    }
    serde_json::to_string(&rows).map_err(err)
}

/// Runs a circuit document; `drop_limit` 0 disables state drop.
pub fn simulate_json(circuit: &str, drop_limit: usize) -> Result<String, String> {
    let c = parse_circuit(circuit).map_err(err)?;
    if c.n_qubits() > MAX_DEMO_QUBITS + 14 {
        return Err(format!("at most {} qubits in the browser", MAX_DEMO_QUBITS + 14));
    }
    let drop = if drop_limit == 0 { DropConfig::disabled() } else { DropConfig::with_limit(drop_limit).map_err(err)? };
    let report = run_sparse(&c, SparseBackend::Array, drop).map_err(err)?;
    let mut entries = report.final_state.entries().map_err(err)?;
    let support = entries.len();
    entries.sort_by(|a, b| b.1.norm_sqr().total_cmp(&a.1.norm_sqr()).then(a.0.cmp(&b.0)));
    let top = entries
        .iter()
        .take(TOP_ENTRIES)
        .map(|(idx, a)| Entry { ket: idx.ket(c.n_qubits()), re: a.re, im: a.im, probability: a.norm_sqr() })
        .collect();
    let sim = Simulation {
        n_qubits: c.n_qubits(),
        gates: c.gates().len(),
        mixed_choice: select_backend(&c).to_string(),
        support,
        dropped_mass: report.dropped_mass,
        top,
    };
    serde_json::to_string(&sim).map_err(err)
}

#[wasm_bindgen]
pub fn drop_curve(n: usize, limit: usize) -> Result<String, JsError> {
    drop_curve_rows(n, limit).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn grover_curve(r: usize, max_iterations: usize) -> Result<String, JsError> {
    grover_curve_rows(r, max_iterations).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(circuit: &str, drop_limit: usize) -> Result<String, JsError> {
    simulate_json(circuit, drop_limit).map_err(|e| JsError::new(&e))
}
