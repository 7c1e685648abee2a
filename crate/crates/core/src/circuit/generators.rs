//! The three benchmark circuits.
//!
//! Registers are little-endian: qubit `offset + i` carries bit value `2^i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::{Circuit, Gate};

/// H on qubits `0..r` of an `n`-qubit register.
pub fn superposition_circuit(n: usize, r: usize) -> Result<Circuit> {
    if r > n {
        return Err(Error::config(format!("r = {r} exceeds n = {n}")));
    }
    let mut circuit = Circuit::new(n)?;
    circuit.extend((0..r).map(|q| Gate::H { q }))?;
    Ok(circuit)
}

/// Qubit layout of the `k`-bit adder: inputs `a` and `b`, the `sum` output and
/// five ancillas, `3k + 5` qubits in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdderLayout {
    pub k: usize,
}

impl AdderLayout {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("adder width k must be at least 1"));
        }
        if 3 * k + 5 > crate::state::MAX_QUBITS {
            return Err(Error::config(format!("adder width k = {k} needs more than 64 qubits")));
        }
        Ok(AdderLayout { k })
    }

    pub fn total_qubits(&self) -> usize {
        3 * self.k + 5
    }

    pub fn a(&self, i: usize) -> usize {
        i
    }

    pub fn b(&self, i: usize) -> usize {
        self.k + i
    }

    pub fn sum(&self, i: usize) -> usize {
        2 * self.k + i
    }

    pub fn ancilla(&self, j: usize) -> usize {
        3 * self.k + j
    }

    pub fn a_qubits(&self) -> Vec<usize> {
        (0..self.k).map(|i| self.a(i)).collect()
    }

    pub fn b_qubits(&self) -> Vec<usize> {
        (0..self.k).map(|i| self.b(i)).collect()
    }

    pub fn sum_qubits(&self) -> Vec<usize> {
        (0..self.k).map(|i| self.sum(i)).collect()
    }

    pub fn ancilla_qubits(&self) -> Vec<usize> {
        (0..5).map(|j| self.ancilla(j)).collect()
    }

    fn register_circuit(&self, circuit: &mut Circuit) -> Result<()> {
        circuit.set_register("a", self.a_qubits())?;
        circuit.set_register("b", self.b_qubits())?;
        circuit.set_register("sum", self.sum_qubits())?;
        circuit.set_register("ancilla", self.ancilla_qubits())
    }
}

/// Ripple-carry adder writing `(a + b) mod 2^k` into a zeroed `sum` register.
///
/// The inputs are left untouched. Ancilla 0 holds the running carry and
/// ancilla 1 receives the next carry, which is swapped down once the old
/// carry has been cleared against `sum_i ^ a_i ^ b_i`. Ancilla 1 is then
/// reset; it is already `|0>` at that point. Ancillas 2..4 stay idle.
///
/// Every gate apart from the resets is self-inverse, and the resets sit where
/// their qubit is `|0>` on any input, so the reversed list uncomputes `sum`.
pub fn adder_gates(layout: AdderLayout) -> Vec<Gate> {
    let k = layout.k;
    let carry = layout.ancilla(0);
    let next = layout.ancilla(1);
    let mut gates = Vec::with_capacity(11 * k);
    for i in 0..k {
        let (a, b, s) = (layout.a(i), layout.b(i), layout.sum(i));
        gates.push(Gate::Cx { c: a, t: s });
        gates.push(Gate::Cx { c: b, t: s });
        if i > 0 {
            gates.push(Gate::Cx { c: carry, t: s });
        }
        if i + 1 < k {
            // next = majority(a, b, carry) = ab ^ a.carry ^ b.carry
            gates.push(Gate::Ccx { c1: a, c2: b, t: next });
            if i > 0 {
                gates.push(Gate::Ccx { c1: a, c2: carry, t: next });
                gates.push(Gate::Ccx { c1: b, c2: carry, t: next });
            }
        }
        if i > 0 {
            gates.push(Gate::Cx { c: s, t: carry });
            gates.push(Gate::Cx { c: a, t: carry });
            gates.push(Gate::Cx { c: b, t: carry });
        }
        if i + 1 < k {
            gates.push(Gate::Swap { a: carry, b: next });
            gates.push(Gate::Reset { q: next });
        }
    }
    gates
}

/// H on the first `r` input qubits followed by the `k`-bit adder.
pub fn addition_circuit(k: usize, r: usize) -> Result<Circuit> {
    let layout = AdderLayout::new(k)?;
    if r > 2 * k {
        return Err(Error::config(format!("r = {r} exceeds the 2k = {} input qubits", 2 * k)));
    }
    let mut circuit = Circuit::new(layout.total_qubits())?;
    layout.register_circuit(&mut circuit)?;
    circuit.extend((0..r).map(|q| Gate::H { q }))?;
    circuit.extend(adder_gates(layout))?;
    Ok(circuit)
}

/// Grover search for `a = 0` over a `search_qubits`-bit register.
///
/// The search register is the adder's `a` input, `b` stays zero and the
/// oracle register is the adder's `sum` output, which therefore mirrors `a`.
/// Layout: H on `a`, adder, then per iteration: zero oracle on `sum`, adder
/// uncompute, diffusion on `a`, adder recompute. The uncompute step keeps the
/// diffusion from seeing `a` entangled with `sum`.
///
/// Registers `search` and `oracle` are recorded on the circuit.
pub fn grover_circuit(search_qubits: usize, iterations: usize) -> Result<Circuit> {
    let layout = AdderLayout::new(search_qubits)?;
    let search = layout.a_qubits();
    let oracle = layout.sum_qubits();
    let forward = adder_gates(layout);
    let mut backward = forward.clone();
    backward.reverse();

    let mut circuit = Circuit::new(layout.total_qubits())?;
    layout.register_circuit(&mut circuit)?;
    circuit.set_register("search", search.clone())?;
    circuit.set_register("oracle", oracle.clone())?;
    circuit.extend(search.iter().map(|&q| Gate::H { q }))?;
    circuit.extend(forward.iter().cloned())?;
    for _ in 0..iterations {
        circuit.push(Gate::ZeroOracle { qubits: oracle.clone() })?;
        circuit.extend(backward.iter().cloned())?;
        circuit.push(Gate::Diffusion { qubits: search.clone() })?;
        circuit.extend(forward.iter().cloned())?;
    }
    Ok(circuit)
}

/// `floor(pi / (4 theta))` with `sin theta = 2^(-r/2)`.
pub fn optimal_grover_iterations(search_qubits: usize) -> usize {
    let theta = (0.5f64).powf(search_qubits as f64 / 2.0).asin();
    (PI / (4.0 * theta)).floor() as usize
}
