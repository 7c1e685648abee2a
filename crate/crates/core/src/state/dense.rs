use crate::error::{Error, Result};

use super::{check_qubit_count, Amplitude, BasisIndex, StateView, PRUNE_EPS};

/// Full state vector of `2^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl DenseState {
    /// All-zero vector; errors when `n_qubits > cap`.
    pub(crate) fn zeros(n_qubits: usize, cap: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if n_qubits > cap {
            return Err(Error::Capacity(format!(
                "dense state of {n_qubits} qubits exceeds the cap of {cap}"
            )));
        }
        let len = 1usize
            .checked_shl(n_qubits as u32)
            .ok_or_else(|| Error::Capacity(format!("2^{n_qubits} amplitudes overflow")))?;
        let mut amplitudes = Vec::new();
        amplitudes.try_reserve_exact(len).map_err(|_| {
            Error::Capacity(format!("allocation of 2^{n_qubits} amplitudes failed"))
        })?;
        amplitudes.resize(len, Amplitude::new(0.0, 0.0));
        Ok(DenseState { n_qubits, amplitudes })
    }

    /// `|0...0>` on `n_qubits`, refusing sizes above `cap`.
    pub fn new_zero(n_qubits: usize, cap: usize) -> Result<Self> {
        let mut state = DenseState::zeros(n_qubits, cap)?;
        state.amplitudes[0] = Amplitude::new(1.0, 0.0);
        Ok(state)
    }

    /// Wraps an explicit vector whose length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::config(format!("{len} amplitudes is not 2^n with n >= 1")));
        }
        Ok(DenseState { n_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, idx: BasisIndex) -> Amplitude {
        self.amplitudes[idx.0 as usize]
    }

    pub fn l2_norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl StateView for DenseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Entries with magnitude at or above [`PRUNE_EPS`].
    fn support(&self) -> Result<Vec<(BasisIndex, Amplitude)>> {
        let eps2 = PRUNE_EPS * PRUNE_EPS;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() >= eps2)
            .map(|(i, a)| (BasisIndex(i as u64), *a))
            .collect())
    }

    fn norm_sqr(&self) -> Result<f64> {
        Ok(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }
}
