//! Dense state-vector reference simulator.
//!
//! Gates are applied in place by walking amplitude pairs with a stride over
//! the target bit; no gate matrix is ever built.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use crate::circuit::{diffusion_decomposition, Circuit, Gate};
use crate::error::{Error, Result};
use crate::state::{qubit_mask, DenseState, DENSE_CAP};

/// Simulates `circuit` from `|0...0>` under the default [`DENSE_CAP`].
pub fn run_dense(circuit: &Circuit) -> Result<DenseState> {
    run_dense_with_cap(circuit, DENSE_CAP)
}

pub fn run_dense_with_cap(circuit: &Circuit, cap: usize) -> Result<DenseState> {
    run_dense_until(circuit, cap, None)
}

/// As [`run_dense_with_cap`], giving up with [`Error::Timeout`] once `deadline`
/// has passed (checked between gates).
pub fn run_dense_until(circuit: &Circuit, cap: usize, deadline: Option<Instant>) -> Result<DenseState> {
    let mut state = DenseState::new_zero(circuit.n_qubits(), cap)?;
    for (i, gate) in circuit.gates().iter().enumerate() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout(format!("dense run stopped at gate {i}")));
        }
        apply_gate_dense(&mut state, gate)?;
    }
    Ok(state)
}

/// Applies one gate. Only `reset` can fail, when the qubit is surely `|1>`.
pub fn apply_gate_dense(state: &mut DenseState, gate: &Gate) -> Result<()> {
    match gate {
        Gate::H { q } => hadamard(state, 1 << q),
        Gate::X { q } => controlled_flip(state, 0, 1 << q),
        Gate::Cx { c, t } => controlled_flip(state, 1 << c, 1 << t),
        Gate::Ccx { c1, c2, t } => controlled_flip(state, (1 << c1) | (1 << c2), 1 << t),
        Gate::Mcx { controls, t } => controlled_flip(state, qubit_mask(controls) as usize, 1 << t),
        Gate::Swap { a, b } => swap(state, 1 << a, 1 << b),
        Gate::ZeroOracle { qubits } => negate_zero_pattern(state, qubit_mask(qubits)),
        Gate::Reset { q } => return reset(state, *q),
        Gate::Diffusion { qubits } => {
            for inner in diffusion_decomposition(qubits) {
                apply_gate_dense(state, &inner)?;
            }
            // The decomposition is -(2|s><s| - I).
            for a in state.amplitudes_mut() {
                *a = -*a;
            }
        }
    }
    Ok(())
}

fn hadamard(state: &mut DenseState, bit: usize) {
    let amps = state.amplitudes_mut();
    for block in amps.chunks_exact_mut(2 * bit) {
        let (low, high) = block.split_at_mut(bit);
        for (a0, a1) in low.iter_mut().zip(high.iter_mut()) {
            let lo = *a0 * FRAC_1_SQRT_2;
            let hi = *a1 * FRAC_1_SQRT_2;
            *a0 = lo + hi;
            *a1 = lo - hi;
        }
    }
}

fn controlled_flip(state: &mut DenseState, controls: usize, target: usize) {
    let amps = state.amplitudes_mut();
    for (b, block) in amps.chunks_exact_mut(2 * target).enumerate() {
        let start = b * 2 * target;
        let (low, high) = block.split_at_mut(target);
        for (offset, (a0, a1)) in low.iter_mut().zip(high.iter_mut()).enumerate() {
            if (start + offset) & controls == controls {
                std::mem::swap(a0, a1);
            }
        }
    }
}

fn swap(state: &mut DenseState, a: usize, b: usize) {
    let both = a | b;
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & a != 0 && i & b == 0 {
            amps.swap(i, i ^ both);
        }
    }
}

fn negate_zero_pattern(state: &mut DenseState, mask: u64) {
    let mask = mask as usize;
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if i & mask == 0 {
            *a = -*a;
        }
    }
}

fn reset(state: &mut DenseState, q: usize) -> Result<()> {
    let bit = 1usize << q;
    let mut removed = 0.0;
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if i & bit != 0 && (a.re != 0.0 || a.im != 0.0) {
            removed += a.norm_sqr();
            *a = Default::default();
        }
    }
    if removed == 0.0 {
        return Ok(());
    }
    log::warn!("reset of qubit {q} discarded probability {removed:e}");
    let norm = state.l2_norm();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::state(format!("reset of qubit {q} left an empty state")));
    }
    for a in state.amplitudes_mut() {
        *a /= norm;
    }
    Ok(())
}
