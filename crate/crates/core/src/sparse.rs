//! Gate application over [`SparseState`], the state-drop approximation and the
//! direct diffusion.
//!
//! Only `h` and `diffusion` can grow the support. The permutation gates
//! (`x`, `cx`, `ccx`, `mcx`, `swap`) rewrite keys one-to-one, `zero_oracle`
//! flips signs in place and `reset` deletes entries.
//!
//! With dropping enabled, the state is cut back to the `limit` entries of
//! largest magnitude after every `h` and every `diffusion`, then renormalized.

use std::time::Instant;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::state::{
    qubit_mask, BasisIndex, DropConfig, KeyRewrite, SparseBackend, SparseState, StateView, PRUNE_EPS,
};

/// Outcome of a sparse run.
#[derive(Debug)]
pub struct RunReport {
    pub final_state: SparseState,
    /// Cumulative probability removed by state drop, measured against the
    /// initial norm: `1 - prod(1 - d_i)` over the individual drops `d_i`.
    pub dropped_mass: f64,
    /// Largest support seen after any gate, before dropping.
    pub peak_support: usize,
    pub gate_count: usize,
    /// Probability removed by resets of qubits that were not `|0>`.
    pub reset_discarded_mass: f64,
}

pub fn run_sparse(circuit: &Circuit, backend: SparseBackend, drop: DropConfig) -> Result<RunReport> {
    run_sparse_until(circuit, backend, drop, None)
}

/// As [`run_sparse`], giving up with [`Error::Timeout`] once `deadline` has
/// passed (checked between gates).
pub fn run_sparse_until(
    circuit: &Circuit,
    backend: SparseBackend,
    drop: DropConfig,
    deadline: Option<Instant>,
) -> Result<RunReport> {
    if drop.enabled && drop.limit == 0 {
        return Err(Error::config("drop limit must be at least 1"));
    }
    let mut state = SparseState::new_zero(circuit.n_qubits(), backend)?;
    let mut kept_fraction = 1.0;
    let mut peak_support = 1;
    let mut reset_discarded_mass = 0.0;
    for (i, gate) in circuit.gates().iter().enumerate() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout(format!("sparse run stopped at gate {i}")));
        }
        reset_discarded_mass += apply_gate(&mut state, gate)?;
        if branches(gate) {
            let support = state.nonzero_count()?;
            peak_support = peak_support.max(support);
            if drop.enabled && support > drop.limit {
                let removed = state_drop(&mut state, drop.limit)?;
                kept_fraction *= 1.0 - removed;
            }
        }
    }
    state.prune(PRUNE_EPS)?;
    state.renormalize()?;
    Ok(RunReport {
        final_state: state,
        dropped_mass: 1.0 - kept_fraction,
        peak_support,
        gate_count: circuit.gates().len(),
        reset_discarded_mass,
    })
}

fn branches(gate: &Gate) -> bool {
    matches!(gate, Gate::H { .. } | Gate::Diffusion { .. })
}

/// Applies one gate in place.
pub fn apply_gate_sparse(state: &mut SparseState, gate: &Gate) -> Result<()> {
    apply_gate(state, gate).map(|_| ())
}

/// Returns the probability a reset discarded; zero for every other gate.
fn apply_gate(state: &mut SparseState, gate: &Gate) -> Result<f64> {
    gate.validate(state.n_qubits())?;
    let flip = |controls: u64, target: usize| KeyRewrite::ControlledFlip { controls, target: 1 << target };
    match gate {
        Gate::H { q } => state.storage_mut().hadamard(1 << q, PRUNE_EPS)?,
        Gate::X { q } => state.storage_mut().rewrite(flip(0, *q))?,
        Gate::Cx { c, t } => state.storage_mut().rewrite(flip(1 << c, *t))?,
        Gate::Ccx { c1, c2, t } => state.storage_mut().rewrite(flip((1 << c1) | (1 << c2), *t))?,
        Gate::Mcx { controls, t } => state.storage_mut().rewrite(flip(qubit_mask(controls), *t))?,
        Gate::Swap { a, b } => state.storage_mut().rewrite(KeyRewrite::Swap { a: 1 << a, b: 1 << b })?,
        Gate::ZeroOracle { qubits } => state.storage_mut().negate_zero_pattern(qubit_mask(qubits))?,
        Gate::Diffusion { qubits } => diffusion_direct(state, qubits)?,
        Gate::Reset { q } => {
            let removed = state.storage_mut().remove_where_set(1 << q)?;
            if removed == 0.0 {
                return Ok(0.0);
            }
            log::warn!("reset of qubit {q} discarded probability {removed:e}");
            if state.nonzero_count()? == 0 {
                return Err(Error::state(format!("reset of qubit {q} left an empty state")));
            }
            state.renormalize()?;
            return Ok(removed);
        }
    }
    Ok(0.0)
}

/// Keeps the `limit` entries of largest magnitude (ties go to the smaller
/// index), renormalizes them, and returns the removed probability as measured
/// before renormalization.
pub fn state_drop(state: &mut SparseState, limit: usize) -> Result<f64> {
    if limit == 0 {
        return Err(Error::config("drop limit must be at least 1"));
    }
    if state.nonzero_count()? <= limit {
        return Ok(0.0);
    }
    let removed = state.storage_mut().retain_largest(limit)?;
    state.renormalize()?;
    Ok(removed)
}

/// Grover diffusion computed directly: entries are grouped by their bits
/// outside `search_qubits`, and within each group every amplitude `a` becomes
/// `2 * mean - a`, the mean running over all `2^|search|` patterns. Patterns
/// missing from a group with non-zero mean are filled in with `2 * mean`.
pub fn diffusion_direct(state: &mut SparseState, search_qubits: &[usize]) -> Result<()> {
    Gate::Diffusion { qubits: search_qubits.to_vec() }.validate(state.n_qubits())?;
    state.storage_mut().diffusion(qubit_mask(search_qubits), PRUNE_EPS)
}

/// Probability that `mask_qubits` read `pattern` (bits of `pattern` outside
/// the mask are ignored).
pub fn measure_probability<S: StateView + ?Sized>(
    state: &S,
    pattern: BasisIndex,
    mask_qubits: &[usize],
) -> Result<f64> {
    let mask = qubit_mask(mask_qubits);
    let want = pattern.bits() & mask;
    Ok(state
        .support()?
        .iter()
        .filter(|(idx, _)| idx.bits() & mask == want)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}
