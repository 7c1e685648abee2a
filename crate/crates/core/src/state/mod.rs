//! Quantum state representations.
//!
//! A [`SparseState`] keeps only the basis states whose amplitude magnitude is
//! at least [`PRUNE_EPS`]. It lives behind one of two storage encodings:
//!
//! - [`SparseBackend::Array`]: a contiguous vector of `(index, amplitude)`
//!   pairs kept sorted by index.
//! - [`SparseBackend::IndexedStore`]: an embedded SQLite table in a temporary
//!   file, keyed by basis index. Every gate is one batched transaction.
//!
//! [`DenseState`] is the full `2^n` amplitude vector used by the reference
//! simulator.

mod array;
mod dense;
#[cfg(feature = "store")]
mod store;

use std::fmt;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dense::DenseState;

use array::ArrayStorage;
#[cfg(feature = "store")]
use store::IndexedStorage;

/// Complex amplitude of one basis state.
pub type Amplitude = Complex64;

/// Entries with magnitude below this are treated as exact zeros and removed.
pub const PRUNE_EPS: f64 = 1e-12;

/// Tolerance for normalization checks.
pub const NORM_TOL: f64 = 1e-9;

/// Width of the basis-index key.
pub const MAX_QUBITS: usize = 64;

/// Largest qubit count the dense simulator will allocate (16 B x 2^26 = 1 GiB).
pub const DENSE_CAP: usize = 26;

/// Default entry limit of the state-drop approximation.
pub const DEFAULT_DROP_LIMIT: usize = 1000;

/// A computational basis state. Qubit `i` is bit `i` of the pattern.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisIndex(pub u64);

impl BasisIndex {
    pub const ZERO: BasisIndex = BasisIndex(0);

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn bit(self, qubit: usize) -> bool {
        (self.0 >> qubit) & 1 == 1
    }

    /// Gathers the bits at `qubits` into a little-endian register value.
    pub fn register_value(self, qubits: &[usize]) -> u64 {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | ((self.0 >> q) & 1) << j)
    }

    /// Scatters a little-endian register value onto `qubits`.
    pub fn from_register_value(value: u64, qubits: &[usize]) -> BasisIndex {
        BasisIndex(
            qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | ((value >> j) & 1) << q),
        )
    }

    /// Renders the index as a ket with qubit `n_qubits - 1` leftmost.
    pub fn ket(self, n_qubits: usize) -> String {
        let bits: String = (0..n_qubits)
            .rev()
            .map(|q| if self.bit(q) { '1' } else { '0' })
            .collect();
        format!("|{bits}>")
    }

    pub(crate) fn fits(self, n_qubits: usize) -> bool {
        n_qubits >= 64 || self.0 >> n_qubits == 0
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisIndex({:#b})", self.0)
    }
}

impl From<u64> for BasisIndex {
    fn from(bits: u64) -> Self {
        BasisIndex(bits)
    }
}

/// Bit mask over a list of qubits.
pub(crate) fn qubit_mask(qubits: &[usize]) -> u64 {
    qubits.iter().fold(0, |m, &q| m | 1u64 << q)
}

pub(crate) fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::config(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Storage encoding of a sparse state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SparseBackend {
    Array,
    IndexedStore,
}

impl SparseBackend {
    pub fn label(self) -> &'static str {
        match self {
            SparseBackend::Array => "array",
            SparseBackend::IndexedStore => "store",
        }
    }
}

impl fmt::Display for SparseBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameters of the state-drop approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropConfig {
    pub enabled: bool,
    pub limit: usize,
}

impl DropConfig {
    pub fn disabled() -> Self {
        DropConfig { enabled: false, limit: DEFAULT_DROP_LIMIT }
    }

    pub fn with_limit(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::config("drop limit must be at least 1"));
        }
        Ok(DropConfig { enabled: true, limit })
    }
}

impl Default for DropConfig {
    fn default() -> Self {
        DropConfig::disabled()
    }
}

/// Key rewrite performed by the permutation gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum KeyRewrite {
    /// Flip `target` when every bit of `controls` is set.
    ControlledFlip { controls: u64, target: u64 },
    /// Exchange two bits.
    Swap { a: u64, b: u64 },
}

impl KeyRewrite {
    pub(crate) fn apply(self, idx: u64) -> u64 {
        match self {
            KeyRewrite::ControlledFlip { controls, target } => {
                if idx & controls == controls {
                    idx ^ target
                } else {
                    idx
                }
            }
            KeyRewrite::Swap { a, b } => {
                if (idx & a == 0) != (idx & b == 0) {
                    idx ^ (a | b)
                } else {
                    idx
                }
            }
        }
    }
}

/// Operations every sparse encoding provides. Indices are raw bit patterns;
/// `entries` is always in ascending index order.
pub(crate) trait Storage: Send {
    fn len(&self) -> Result<usize>;
    fn entries(&self) -> Result<Vec<(u64, Amplitude)>>;
    fn amplitude(&self, idx: u64) -> Result<Amplitude>;
    fn norm_sqr(&self) -> Result<f64>;
    /// Hadamard on the qubit whose mask is `bit`, dropping results below `eps`.
    fn hadamard(&mut self, bit: u64, eps: f64) -> Result<()>;
    fn rewrite(&mut self, rewrite: KeyRewrite) -> Result<()>;
    /// Negate every entry whose bits under `mask` are all zero.
    fn negate_zero_pattern(&mut self, mask: u64) -> Result<()>;
    /// Delete every entry with `bit` set, returning the deleted probability.
    fn remove_where_set(&mut self, bit: u64) -> Result<f64>;
    fn divide(&mut self, norm: f64) -> Result<()>;
    fn prune(&mut self, eps: f64) -> Result<()>;
    /// `a -> 2 * mean - a` over the `mask` qubits, grouped by the other bits.
    fn diffusion(&mut self, mask: u64, eps: f64) -> Result<()>;
    /// Keep the `limit` largest-magnitude entries; return the removed probability.
    fn retain_largest(&mut self, limit: usize) -> Result<f64>;
}

/// Read access shared by sparse and dense states.
pub trait StateView {
    fn n_qubits(&self) -> usize;

    /// Non-zero entries in ascending index order.
    fn support(&self) -> Result<Vec<(BasisIndex, Amplitude)>>;

    fn norm_sqr(&self) -> Result<f64>;
}

/// Sparse map from basis index to amplitude.
pub struct SparseState {
    n_qubits: usize,
    backend: SparseBackend,
    storage: Box<dyn Storage>,
}

impl fmt::Debug for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseState")
            .field("n_qubits", &self.n_qubits)
            .field("backend", &self.backend)
            .field("entries", &self.storage.len().ok())
            .finish()
    }
}

fn open_storage(backend: SparseBackend, entries: Vec<(u64, Amplitude)>) -> Result<Box<dyn Storage>> {
    match backend {
        SparseBackend::Array => Ok(Box::new(ArrayStorage::from_sorted(entries))),
        #[cfg(feature = "store")]
        SparseBackend::IndexedStore => Ok(Box::new(IndexedStorage::create(&entries)?)),
        #[cfg(not(feature = "store"))]
        SparseBackend::IndexedStore => Err(Error::config(
            "indexed-store backend not compiled in (enable the `store` feature)",
        )),
    }
}

impl SparseState {
    /// The all-zeros state `|0...0>`.
    pub fn new_zero(n_qubits: usize, backend: SparseBackend) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let storage = open_storage(backend, vec![(0, Amplitude::new(1.0, 0.0))])?;
        Ok(SparseState { n_qubits, backend, storage })
    }

    /// Builds a state from explicit entries. Duplicate indices are summed and
    /// entries below [`PRUNE_EPS`] are discarded; no normalization happens.
    pub fn from_entries(
        n_qubits: usize,
        backend: SparseBackend,
        entries: impl IntoIterator<Item = (BasisIndex, Amplitude)>,
    ) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut raw: Vec<(u64, Amplitude)> = Vec::new();
        for (idx, amp) in entries {
            if !idx.fits(n_qubits) {
                return Err(Error::config(format!(
                    "basis index {:#b} exceeds {n_qubits} qubits",
                    idx.0
                )));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::state(format!("non-finite amplitude at {:#b}", idx.0)));
            }
            raw.push((idx.0, amp));
        }
        raw.sort_by_key(|e| e.0);
        let mut merged: Vec<(u64, Amplitude)> = Vec::with_capacity(raw.len());
        for (idx, amp) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == idx => last.1 += amp,
                _ => merged.push((idx, amp)),
            }
        }
        let eps2 = PRUNE_EPS * PRUNE_EPS;
        merged.retain(|e| e.1.norm_sqr() >= eps2);
        let storage = open_storage(backend, merged)?;
        Ok(SparseState { n_qubits, backend, storage })
    }

    /// Sparse copy of a dense vector keeping entries with magnitude `>= eps`.
    pub fn from_dense(dense: &DenseState, eps: f64, backend: SparseBackend) -> Result<Self> {
        let eps2 = eps * eps;
        let entries: Vec<(u64, Amplitude)> = dense
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() >= eps2)
            .map(|(i, a)| (i as u64, *a))
            .collect();
        let storage = open_storage(backend, entries)?;
        Ok(SparseState { n_qubits: dense.n_qubits(), backend, storage })
    }

    pub fn backend(&self) -> SparseBackend {
        self.backend
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of stored entries.
    pub fn nonzero_count(&self) -> Result<usize> {
        self.storage.len()
    }

    pub fn amplitude(&self, idx: BasisIndex) -> Result<Amplitude> {
        self.storage.amplitude(idx.0)
    }

    /// Stored entries in ascending index order.
    pub fn entries(&self) -> Result<Vec<(BasisIndex, Amplitude)>> {
        Ok(self
            .storage
            .entries()?
            .into_iter()
            .map(|(i, a)| (BasisIndex(i), a))
            .collect())
    }

    pub fn l2_norm(&self) -> Result<f64> {
        Ok(self.storage.norm_sqr()?.sqrt())
    }

    /// Divides every amplitude by the current norm.
    pub fn renormalize(&mut self) -> Result<()> {
        let norm = self.l2_norm()?;
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::state("cannot renormalize a zero-norm state"));
        }
        self.storage.divide(norm)
    }

    /// Removes entries with magnitude strictly below `eps`.
    pub fn prune(&mut self, eps: f64) -> Result<()> {
        self.storage.prune(eps)
    }

    /// Copy of this state under another encoding.
    pub fn convert(&self, backend: SparseBackend) -> Result<SparseState> {
        let storage = open_storage(backend, self.storage.entries()?)?;
        Ok(SparseState { n_qubits: self.n_qubits, backend, storage })
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        self.to_dense_with_cap(DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseState> {
        let mut dense = DenseState::zeros(self.n_qubits, cap)?;
        let amps = dense.amplitudes_mut();
        for (idx, amp) in self.storage.entries()? {
            amps[idx as usize] = amp;
        }
        Ok(dense)
    }

    pub(crate) fn storage_mut(&mut self) -> &mut dyn Storage {
        self.storage.as_mut()
    }
}

impl StateView for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn support(&self) -> Result<Vec<(BasisIndex, Amplitude)>> {
        self.entries()
    }

    fn norm_sqr(&self) -> Result<f64> {
        self.storage.norm_sqr()
    }
}

/// `<a|b>`, summed over the common support.
pub fn overlap<A, B>(a: &A, b: &B) -> Result<Amplitude>
where
    A: StateView + ?Sized,
    B: StateView + ?Sized,
{
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::Dimension { left: a.n_qubits(), right: b.n_qubits() });
    }
    let left = a.support()?;
    let right = b.support()?;
    let (mut i, mut j) = (0, 0);
    let mut acc = Amplitude::new(0.0, 0.0);
    while i < left.len() && j < right.len() {
        match left[i].0.cmp(&right[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += left[i].1.conj() * right[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(acc)
}

/// `1 - |<exact|approx>|^2`, clamped to `[0, 1]`.
pub fn infidelity<A, B>(exact: &A, approx: &B) -> Result<f64>
where
    A: StateView + ?Sized,
    B: StateView + ?Sized,
{
    let ov = overlap(exact, approx)?;
    Ok((1.0 - ov.norm_sqr()).clamp(0.0, 1.0))
}

/// Draws one measurement outcome from a normalized state. The same seed always
/// yields the same outcome.
pub fn sample_measurement<S: StateView + ?Sized>(state: &S, seed: u64) -> Result<BasisIndex> {
    let entries = state.support()?;
    let total: f64 = entries.iter().map(|e| e.1.norm_sqr()).sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::state(format!(
            "cannot sample an unnormalized state (norm^2 = {total})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 53 random bits -> uniform in [0, 1).
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * total;
    let mut acc = 0.0;
    for (idx, amp) in &entries {
        acc += amp.norm_sqr();
        if u < acc {
            return Ok(*idx);
        }
    }
    entries
        .last()
        .map(|e| e.0)
        .ok_or_else(|| Error::state("cannot sample an empty state"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn backends() -> Vec<SparseBackend> {
        let mut all = vec![SparseBackend::Array];
        if cfg!(feature = "store") {
            all.push(SparseBackend::IndexedStore);
        }
        all
    }

    #[test]
    fn zero_state_has_single_entry() {
        for backend in backends() {
            let s = SparseState::new_zero(3, backend).unwrap();
            assert_eq!(s.entries().unwrap(), vec![(BasisIndex(0), c(1.0))]);
            let s = SparseState::new_zero(1, backend).unwrap();
            assert_eq!(s.nonzero_count().unwrap(), 1);
        }
        assert!(matches!(
            SparseState::new_zero(65, SparseBackend::Array),
            Err(Error::Config(_))
        ));
        assert!(SparseState::new_zero(0, SparseBackend::Array).is_err());
        assert!(SparseState::new_zero(64, SparseBackend::Array).is_ok());
    }

    #[test]
    fn norm_and_renormalize() {
        for backend in backends() {
            let s = SparseState::from_entries(1, backend, [(BasisIndex(0), c(0.6)), (BasisIndex(1), c(0.8))])
                .unwrap();
            assert!((s.l2_norm().unwrap() - 1.0).abs() < 1e-15);

            let mut s = SparseState::from_entries(1, backend, [(BasisIndex(0), c(0.5))]).unwrap();
            s.renormalize().unwrap();
            assert_eq!(s.amplitude(BasisIndex(0)).unwrap(), c(1.0));

            let mut s =
                SparseState::from_entries(1, backend, [(BasisIndex(0), c(0.5)), (BasisIndex(1), c(0.5))]).unwrap();
            s.renormalize().unwrap();
            for (_, a) in s.entries().unwrap() {
                assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
            }

            let mut empty = SparseState::from_entries(2, backend, []).unwrap();
            assert!(matches!(empty.renormalize(), Err(Error::State(_))));
        }
    }

    #[test]
    fn prune_removes_only_small_entries() {
        for backend in backends() {
            let mut s =
                SparseState::from_entries(1, backend, [(BasisIndex(0), c(1.0)), (BasisIndex(1), c(1e-9))]).unwrap();
            s.prune(1e-12).unwrap();
            assert_eq!(s.nonzero_count().unwrap(), 2);
            s.prune(1e-6).unwrap();
            assert_eq!(s.entries().unwrap(), vec![(BasisIndex(0), c(1.0))]);
            s.prune(1e-12).unwrap();
            assert_eq!(s.nonzero_count().unwrap(), 1);
        }
        // Sub-epsilon input entries never get stored at all.
        let s = SparseState::from_entries(1, SparseBackend::Array, [(BasisIndex(0), c(1.0)), (BasisIndex(1), c(1e-17))])
            .unwrap();
        assert_eq!(s.nonzero_count().unwrap(), 1);
    }

    #[test]
    fn from_entries_rejects_bad_input() {
        assert!(SparseState::from_entries(2, SparseBackend::Array, [(BasisIndex(4), c(1.0))]).is_err());
        assert!(SparseState::from_entries(2, SparseBackend::Array, [(BasisIndex(1), c(f64::NAN))]).is_err());
        let s = SparseState::from_entries(64, SparseBackend::Array, [(BasisIndex(u64::MAX), c(1.0))]).unwrap();
        assert_eq!(s.nonzero_count().unwrap(), 1);
    }

    #[test]
    fn overlap_basics() {
        let zero = SparseState::new_zero(1, SparseBackend::Array).unwrap();
        let one = SparseState::from_entries(1, SparseBackend::Array, [(BasisIndex(1), c(1.0))]).unwrap();
        assert_eq!(overlap(&zero, &zero).unwrap(), c(1.0));
        assert_eq!(overlap(&zero, &one).unwrap(), c(0.0));
        let wide = SparseState::new_zero(2, SparseBackend::Array).unwrap();
        assert!(matches!(overlap(&zero, &wide), Err(Error::Dimension { left: 1, right: 2 })));

        // conj on the left argument
        let i = SparseState::from_entries(1, SparseBackend::Array, [(BasisIndex(0), Amplitude::new(0.0, 1.0))])
            .unwrap();
        assert_eq!(overlap(&i, &zero).unwrap(), Amplitude::new(0.0, -1.0));
    }

    #[test]
    fn overlap_of_truncated_uniform_state() {
        // Uniform over 2048 states against its first 1000 entries renormalized.
        let amp = c(1.0 / 2048f64.sqrt());
        let full = SparseState::from_entries(11, SparseBackend::Array, (0..2048).map(|i| (BasisIndex(i), amp)))
            .unwrap();
        let mut cut =
            SparseState::from_entries(11, SparseBackend::Array, (0..1000).map(|i| (BasisIndex(i), amp))).unwrap();
        cut.renormalize().unwrap();
        let ov = overlap(&full, &cut).unwrap();
        assert!((ov.re - (1000.0f64 / 2048.0).sqrt()).abs() < 1e-12);
        assert!((ov.re - 0.6988).abs() < 1e-4);
    }

    #[test]
    fn sampling() {
        let zero = SparseState::new_zero(3, SparseBackend::Array).unwrap();
        let five = SparseState::from_entries(3, SparseBackend::Array, [(BasisIndex(0b101), c(1.0))]).unwrap();
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(sample_measurement(&zero, seed).unwrap(), BasisIndex(0));
            assert_eq!(sample_measurement(&five, seed).unwrap(), BasisIndex(0b101));
        }
        let h = c(FRAC_1_SQRT_2);
        let plus = SparseState::from_entries(1, SparseBackend::Array, [(BasisIndex(0), h), (BasisIndex(1), h)]).unwrap();
        let zeros = (0..10_000)
            .filter(|&seed| sample_measurement(&plus, seed).unwrap() == BasisIndex(0))
            .count();
        let freq = zeros as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "frequency {freq}");
        assert_eq!(sample_measurement(&plus, 7).unwrap(), sample_measurement(&plus, 7).unwrap());

        let half = SparseState::from_entries(1, SparseBackend::Array, [(BasisIndex(0), c(0.5))]).unwrap();
        assert!(matches!(sample_measurement(&half, 0), Err(Error::State(_))));
    }

    #[test]
    fn dense_conversion() {
        let s = SparseState::new_zero(2, SparseBackend::Array).unwrap();
        assert_eq!(s.to_dense().unwrap().amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);

        let bell = DenseState::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
        let sparse = SparseState::from_dense(&bell, PRUNE_EPS, SparseBackend::Array).unwrap();
        let idx: Vec<_> = sparse.entries().unwrap().into_iter().map(|e| e.0).collect();
        assert_eq!(idx, vec![BasisIndex(0), BasisIndex(3)]);

        let big = SparseState::new_zero(DENSE_CAP + 1, SparseBackend::Array).unwrap();
        assert!(matches!(big.to_dense(), Err(Error::Capacity(_))));
    }

    #[test]
    fn register_helpers() {
        let qubits = [4, 1, 6];
        let idx = BasisIndex::from_register_value(0b101, &qubits);
        assert_eq!(idx, BasisIndex((1 << 4) | (1 << 6)));
        assert_eq!(idx.register_value(&qubits), 0b101);
        assert_eq!(BasisIndex(0b01).ket(3), "|001>");
    }

    #[test]
    fn key_rewrites() {
        let cx = KeyRewrite::ControlledFlip { controls: 0b01, target: 0b10 };
        assert_eq!(cx.apply(0b01), 0b11);
        assert_eq!(cx.apply(0b10), 0b10);
        let sw = KeyRewrite::Swap { a: 0b001, b: 0b100 };
        assert_eq!(sw.apply(0b001), 0b100);
        assert_eq!(sw.apply(0b101), 0b101);
        let top = KeyRewrite::ControlledFlip { controls: 0, target: 1 << 63 };
        assert_eq!(top.apply(0), 1 << 63);
    }
}
