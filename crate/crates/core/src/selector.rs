//! Mixed encoding: pick sparse or dense execution from the circuit alone.
//!
//! With `h` Hadamard-touched qubits out of `n`, the circuit runs sparse on the
//! indexed store when `h < 2n/3` and dense otherwise. The comparison is done
//! in integers as `3h < 2n`.

use std::fmt;
use std::time::Instant;

use crate::circuit::{hadamard_touched, Circuit};
use crate::dense::run_dense_until;
use crate::error::{Error, Result};
use crate::sparse::{run_sparse_until, RunReport};
use crate::state::{DenseState, DropConfig, SparseBackend, StateView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendChoice {
    Dense,
    Sparse(SparseBackend),
}

impl fmt::Display for BackendChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendChoice::Dense => f.write_str("dense"),
            BackendChoice::Sparse(b) => write!(f, "{b}"),
        }
    }
}

/// The threshold rule on raw counts.
pub fn prefers_sparse(hadamard_qubits: usize, n_qubits: usize) -> bool {
    3 * hadamard_qubits < 2 * n_qubits
}

pub fn select_backend(circuit: &Circuit) -> BackendChoice {
    if prefers_sparse(hadamard_touched(circuit).len(), circuit.n_qubits()) {
        BackendChoice::Sparse(SparseBackend::IndexedStore)
    } else {
        BackendChoice::Dense
    }
}

#[derive(Debug)]
pub enum MixedResult {
    Sparse(RunReport),
    Dense(DenseState),
}

impl MixedResult {
    pub fn state(&self) -> &dyn StateView {
        match self {
            MixedResult::Sparse(report) => &report.final_state,
            MixedResult::Dense(state) => state,
        }
    }
}

/// A mixed run tagged with the branch that fired.
#[derive(Debug)]
pub struct MixedRun {
    pub choice: BackendChoice,
    pub result: MixedResult,
}

pub fn run_mixed(circuit: &Circuit, drop: DropConfig, dense_cap: usize) -> Result<MixedRun> {
    run_mixed_until(circuit, drop, dense_cap, None)
}

pub fn run_mixed_until(
    circuit: &Circuit,
    drop: DropConfig,
    dense_cap: usize,
    deadline: Option<Instant>,
) -> Result<MixedRun> {
    let choice = select_backend(circuit);
    let result = match choice {
        BackendChoice::Dense => {
            if circuit.n_qubits() > dense_cap {
                return Err(Error::Capacity(format!(
                    "mixed heuristic chose dense ({} of {} qubits Hadamard-touched), \
                     but {} qubits exceed the dense cap of {dense_cap}",
                    hadamard_touched(circuit).len(),
                    circuit.n_qubits(),
                    circuit.n_qubits()
                )));
            }
            MixedResult::Dense(run_dense_until(circuit, dense_cap, deadline)?)
        }
        BackendChoice::Sparse(backend) => {
            MixedResult::Sparse(run_sparse_until(circuit, backend, drop, deadline)?)
        }
    };
    Ok(MixedRun { choice, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{addition_circuit, superposition_circuit};

    #[test]
    fn two_thirds_boundary() {
        let pick = |n, r| select_backend(&superposition_circuit(n, r).unwrap());
        assert_eq!(pick(20, 13), BackendChoice::Sparse(SparseBackend::IndexedStore));
        assert_eq!(pick(20, 14), BackendChoice::Dense);
        // h = 2n/3 exactly goes dense
        assert_eq!(pick(3, 2), BackendChoice::Dense);
        assert_eq!(pick(3, 1), BackendChoice::Sparse(SparseBackend::IndexedStore));
        assert_eq!(pick(24, 24), BackendChoice::Dense);
        assert_eq!(pick(24, 4), BackendChoice::Sparse(SparseBackend::IndexedStore));
    }

    #[test]
    fn addition_goes_sparse() {
        let c = addition_circuit(8, 16).unwrap();
        assert_eq!(c.n_qubits(), 29);
        assert_eq!(select_backend(&c), BackendChoice::Sparse(SparseBackend::IndexedStore));
    }

    #[cfg(feature = "store")]
    #[test]
    fn dense_choice_over_cap_names_decision() {
        let c = superposition_circuit(30, 30).unwrap();
        let err = run_mixed(&c, DropConfig::disabled(), 26).unwrap_err();
        assert!(matches!(err, Error::Capacity(ref m) if m.contains("mixed heuristic chose dense")), "{err}");
    }

    #[cfg(feature = "store")]
    #[test]
    fn dispatch() {
        let run = run_mixed(&superposition_circuit(6, 6).unwrap(), DropConfig::disabled(), 26).unwrap();
        assert_eq!(run.choice, BackendChoice::Dense);
        assert!(matches!(run.result, MixedResult::Dense(_)));
        let run = run_mixed(&superposition_circuit(6, 1).unwrap(), DropConfig::disabled(), 26).unwrap();
        assert!(matches!(run.result, MixedResult::Sparse(_)));
        assert_eq!(run.result.state().support().unwrap().len(), 2);
    }
}
