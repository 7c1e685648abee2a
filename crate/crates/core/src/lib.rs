//! Sparse quantum-circuit simulation.
//!
//! States that stay close to classical are stored as maps from basis index to
//! amplitude, either in a sorted in-memory array or in an embedded SQLite
//! table. A dense state-vector simulator serves as the reference, and a
//! static rule picks between the two per circuit. An optional state-drop mode
//! bounds the sparse support by discarding the smallest amplitudes.
//!
//! ```
//! use qsparse::circuit::superposition_circuit;
//! use qsparse::sparse::run_sparse;
//! use qsparse::state::{DropConfig, SparseBackend};
//!
//! let circuit = superposition_circuit(30, 4).unwrap();
//! let report = run_sparse(&circuit, SparseBackend::Array, DropConfig::disabled()).unwrap();
//! assert_eq!(report.final_state.nonzero_count().unwrap(), 16);
//! ```

pub mod bench;
pub mod circuit;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dense;
pub mod error;
pub mod selector;
pub mod sparse;
pub mod state;

pub use error::{Error, Result};
