//! Benchmark harness: runtime grids over (total qubits, nondeterministic
//! qubits, backend), state-drop error studies, and CSV/JSON result tables.

mod grid;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{addition_circuit, grover_circuit, optimal_grover_iterations, superposition_circuit, Circuit};
use crate::error::{Error, Result};

pub use grid::{run_drop_study, run_grid, DropStudyConfig, GridConfig, RRule};
pub use report::{emit_results, read_results, write_results, ResultFormat, CSV_HEADER};

/// Default per-cell time budget in seconds.
pub const DEFAULT_TIME_CUTOFF_S: f64 = 60.0;

/// Default number of timed repeats per cell.
pub const DEFAULT_REPEATS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Superposition,
    Addition,
    Grover,
}

impl Benchmark {
    pub fn label(self) -> &'static str {
        match self {
            Benchmark::Superposition => "superposition",
            Benchmark::Addition => "addition",
            Benchmark::Grover => "grover",
        }
    }

    /// Whether `n` total qubits is a size this benchmark can be built at.
    pub fn admits_total(self, n: usize) -> bool {
        match self {
            Benchmark::Superposition => (1..=64).contains(&n),
            Benchmark::Addition | Benchmark::Grover => n >= 8 && (n - 5).is_multiple_of(3) && n <= 64,
        }
    }

    /// Largest nondeterministic-qubit count at `n` total qubits.
    pub fn max_nondet(self, n: usize) -> usize {
        match self {
            Benchmark::Superposition => n,
            Benchmark::Addition => 2 * ((n - 5) / 3),
            Benchmark::Grover => (n - 5) / 3,
        }
    }

    /// Builds the circuit at `n` total qubits with `r` nondeterministic qubits.
    /// Grover runs at the optimal iteration count for a search register of `r`.
    pub fn circuit(self, n: usize, r: usize) -> Result<Circuit> {
        if !self.admits_total(n) {
            return Err(Error::config(format!("{} cannot be built on {n} qubits", self.label())));
        }
        match self {
            Benchmark::Superposition => superposition_circuit(n, r),
            Benchmark::Addition => addition_circuit((n - 5) / 3, r),
            Benchmark::Grover => {
                if r != self.max_nondet(n) {
                    return Err(Error::config("grover needs the whole search register nondeterministic"));
                }
                grover_circuit(r, optimal_grover_iterations(r))
            }
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "superposition" => Ok(Benchmark::Superposition),
            "addition" => Ok(Benchmark::Addition),
            "grover" => Ok(Benchmark::Grover),
            other => Err(Error::config(format!("unknown benchmark {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Ok,
    CapacityCutoff,
    TimeCutoff,
}

/// Backends a grid can time. `Mixed` defers to the selector per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridBackend {
    Array,
    Store,
    Dense,
    Mixed,
}

impl GridBackend {
    pub fn label(self) -> &'static str {
        match self {
            GridBackend::Array => "array",
            GridBackend::Store => "store",
            GridBackend::Dense => "dense",
            GridBackend::Mixed => "mixed",
        }
    }

    pub fn all() -> Vec<GridBackend> {
        vec![GridBackend::Array, GridBackend::Store, GridBackend::Dense, GridBackend::Mixed]
    }
}

impl fmt::Display for GridBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GridBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "array" => Ok(GridBackend::Array),
            "store" => Ok(GridBackend::Store),
            "dense" => Ok(GridBackend::Dense),
            "mixed" => Ok(GridBackend::Mixed),
            other => Err(Error::config(format!("unknown backend {other:?}"))),
        }
    }
}

/// One row of a result table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub benchmark: Benchmark,
    pub total_qubits: usize,
    pub nondet_qubits: usize,
    pub backend: String,
    pub wall_time_s: f64,
    pub status: Status,
    pub error_metric: Option<f64>,
    pub dropped_mass: Option<f64>,
    pub repeats: usize,
    pub seed: u64,
}

impl BenchPoint {
    fn sort_key(&self) -> (&'static str, usize, usize, &str) {
        (self.benchmark.label(), self.total_qubits, self.nondet_qubits, &self.backend)
    }
}

/// Sorts rows by benchmark, total qubits, nondeterministic qubits, backend.
pub fn sort_points(points: &mut [BenchPoint]) {
    points.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Median of a non-empty sample.
pub(crate) fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut [7.0]), 7.0);
    }

    #[test]
    fn benchmark_sizes() {
        assert!(Benchmark::Addition.admits_total(14));
        assert!(!Benchmark::Addition.admits_total(15));
        assert_eq!(Benchmark::Addition.max_nondet(26), 14);
        assert_eq!(Benchmark::Grover.max_nondet(20), 5);
        assert_eq!(Benchmark::Grover.circuit(14, 3).unwrap(), grover_circuit(3, 2).unwrap());
        assert!(Benchmark::Grover.circuit(14, 2).is_err());
        assert!(Benchmark::Superposition.circuit(4, 5).is_err());
    }
}
