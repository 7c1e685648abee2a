//! Gate set, circuit container and circuit generators.

mod generators;
mod json;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::MAX_QUBITS;

pub use generators::{
    adder_gates, addition_circuit, grover_circuit, optimal_grover_iterations, superposition_circuit,
    AdderLayout,
};
pub use json::{parse_circuit, serialize_circuit};

/// One gate. Field names double as the JSON keys of the circuit format.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Gate {
    H { q: usize },
    X { q: usize },
    Cx { c: usize, t: usize },
    Ccx { c1: usize, c2: usize, t: usize },
    Swap { a: usize, b: usize },
    /// Projects the qubit onto `|0>` and renormalizes.
    Reset { q: usize },
    Mcx { controls: Vec<usize>, t: usize },
    /// Negates every basis state whose listed qubits are all zero.
    ZeroOracle { qubits: Vec<usize> },
    /// Reflection `2|s><s| - I` about the uniform superposition of the listed qubits.
    Diffusion { qubits: Vec<usize> },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Cx { .. } => "cx",
            Gate::Ccx { .. } => "ccx",
            Gate::Swap { .. } => "swap",
            Gate::Reset { .. } => "reset",
            Gate::Mcx { .. } => "mcx",
            Gate::ZeroOracle { .. } => "zero_oracle",
            Gate::Diffusion { .. } => "diffusion",
        }
    }

    /// Every qubit the gate acts on, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { q } | Gate::X { q } | Gate::Reset { q } => vec![*q],
            Gate::Cx { c, t } => vec![*c, *t],
            Gate::Ccx { c1, c2, t } => vec![*c1, *c2, *t],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::Mcx { controls, t } => controls.iter().copied().chain([*t]).collect(),
            Gate::ZeroOracle { qubits } | Gate::Diffusion { qubits } => qubits.clone(),
        }
    }

    /// Checks index bounds, repeated qubits and empty lists.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if qubits.is_empty() {
            return Err(Error::config(format!("{} gate needs at least one qubit", self.name())));
        }
        let mut seen = BTreeSet::new();
        for q in qubits {
            if q >= n_qubits {
                return Err(Error::config(format!(
                    "{} gate: qubit {q} out of range for {n_qubits} qubits",
                    self.name()
                )));
            }
            if !seen.insert(q) {
                return Err(Error::config(format!("{} gate: qubit {q} repeated", self.name())));
            }
        }
        Ok(())
    }
}

/// Qubit count, ordered gates and optional named registers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    registers: BTreeMap<String, Vec<usize>>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::config(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        Ok(Circuit { n_qubits, gates: Vec::new(), registers: BTreeMap::new() })
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)
            .map_err(|e| Error::config(format!("gate {}: {e}", self.gates.len())))?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<&mut Self> {
        for gate in gates {
            self.push(gate)?;
        }
        Ok(self)
    }

    /// Names a group of qubits, e.g. `search`.
    pub fn set_register(&mut self, name: &str, qubits: Vec<usize>) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::config(format!("register {name}: qubit {q} out of range")));
        }
        self.registers.insert(name.to_string(), qubits);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn register(&self, name: &str) -> Option<&[usize]> {
        self.registers.get(name).map(Vec::as_slice)
    }

    pub fn registers(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.registers
    }
}

/// Qubits that carry an H gate somewhere in the circuit. Diffusion counts as
/// touching each of its qubits, since its decomposition opens with H on each.
pub fn hadamard_touched(circuit: &Circuit) -> BTreeSet<usize> {
    let mut touched = BTreeSet::new();
    for gate in circuit.gates() {
        match gate {
            Gate::H { q } => {
                touched.insert(*q);
            }
            Gate::Diffusion { qubits } => touched.extend(qubits.iter().copied()),
            _ => {}
        }
    }
    touched
}

/// Diffusion built from H, X and a multi-controlled X. The sequence equals
/// `-(2|s><s| - I)`; callers apply the global sign themselves.
pub fn diffusion_decomposition(qubits: &[usize]) -> Vec<Gate> {
    let Some((&last, rest)) = qubits.split_last() else {
        return Vec::new();
    };
    let layer = |make: fn(usize) -> Gate| qubits.iter().map(move |&q| make(q));
    let h = |q| Gate::H { q };
    let x = |q| Gate::X { q };
    let flip = match rest {
        [] => Gate::X { q: last },
        [c] => Gate::Cx { c: *c, t: last },
        [c1, c2] => Gate::Ccx { c1: *c1, c2: *c2, t: last },
        _ => Gate::Mcx { controls: rest.to_vec(), t: last },
    };
    layer(h)
        .chain(layer(x))
        .chain([Gate::H { q: last }, flip, Gate::H { q: last }])
        .chain(layer(x))
        .chain(layer(h))
        .collect()
}
