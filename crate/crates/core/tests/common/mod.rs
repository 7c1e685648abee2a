#![allow(dead_code)]

use qsparse::circuit::{Circuit, Gate};
use qsparse::state::{Amplitude, BasisIndex, StateView};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    /// `count` distinct values below `n`.
    pub fn distinct(&mut self, n: usize, count: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

/// A random circuit on `n` qubits (n >= 4) with up to `max_gates` gates.
///
/// The top qubit is an ancilla that is only ever flipped by X and used as a
/// control, so it stays classical and every RESET on it is preceded by enough
/// X gates to bring it back to |0>.
pub fn random_circuit(g: &mut Gen, n: usize, max_gates: usize) -> Circuit {
    assert!(n >= 4);
    let ancilla = n - 1;
    let work = n - 1;
    let mut ancilla_set = false;
    let mut c = Circuit::new(n).unwrap();
    let len = 1 + g.below(max_gates);
    while c.gates().len() < len {
        let gate = match g.below(10) {
            0 | 1 => Gate::H { q: g.below(work) },
            2 => Gate::X { q: g.below(work) },
            3 => {
                let q = g.distinct(work, 2);
                let c = if g.below(4) == 0 { ancilla } else { q[0] };
                Gate::Cx { c, t: q[1] }
            }
            4 => {
                let q = g.distinct(work, 3);
                Gate::Ccx { c1: q[0], c2: q[1], t: q[2] }
            }
            5 => {
                let q = g.distinct(work, 2);
                Gate::Swap { a: q[0], b: q[1] }
            }
            6 => {
                let k = 1 + g.below(work.min(4));
                let mut q = g.distinct(work, k);
                let t = q.pop().unwrap();
                Gate::Mcx { controls: q, t }
            }
            7 => {
                let k = 1 + g.below(work);
                let mut qubits = g.distinct(work, k);
                if g.below(3) == 0 {
                    qubits.push(ancilla);
                }
                Gate::ZeroOracle { qubits }
            }
            8 => {
                let k = 1 + g.below(work.min(5));
                Gate::Diffusion { qubits: g.distinct(work, k) }
            }
            _ => {
                if g.below(2) == 0 {
                    ancilla_set = !ancilla_set;
                    Gate::X { q: ancilla }
                } else {
                    if ancilla_set {
                        c.push(Gate::X { q: ancilla }).unwrap();
                        ancilla_set = false;
                    }
                    Gate::Reset { q: ancilla }
                }
            }
        };
        c.push(gate).unwrap();
    }
    c
}

/// Largest entrywise deviation between two states over the union of their
/// supports.
pub fn max_deviation(a: &dyn StateView, b: &dyn StateView) -> f64 {
    use std::collections::BTreeMap;
    let mut diff: BTreeMap<BasisIndex, Amplitude> = BTreeMap::new();
    for (idx, amp) in a.support().unwrap() {
        *diff.entry(idx).or_default() += amp;
    }
    for (idx, amp) in b.support().unwrap() {
        *diff.entry(idx).or_default() -= amp;
    }
    diff.values().map(|d| d.norm()).fold(0.0, f64::max)
}
