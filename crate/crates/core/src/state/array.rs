use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

use super::{Amplitude, KeyRewrite, Storage};

/// Largest number of qubits a diffusion may enumerate patterns over.
pub(crate) const MAX_DIFFUSION_QUBITS: u32 = 32;

/// Sorted `(index, amplitude)` pairs.
#[derive(Clone, Debug, Default)]
pub(crate) struct ArrayStorage {
    entries: Vec<(u64, Amplitude)>,
}

impl ArrayStorage {
    pub(crate) fn from_sorted(entries: Vec<(u64, Amplitude)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        ArrayStorage { entries }
    }

    fn find(&self, idx: u64) -> Option<Amplitude> {
        self.entries
            .binary_search_by_key(&idx, |e| e.0)
            .ok()
            .map(|pos| self.entries[pos].1)
    }

    fn sort(&mut self) {
        self.entries.sort_unstable_by_key(|e| e.0);
    }
}

/// Every sub-pattern of `mask`, starting from zero.
pub(crate) fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let current = next?;
        let after = current.wrapping_sub(mask) & mask;
        next = (after != 0).then_some(after);
        Some(current)
    })
}

impl Storage for ArrayStorage {
    fn len(&self) -> Result<usize> {
        Ok(self.entries.len())
    }

    fn entries(&self) -> Result<Vec<(u64, Amplitude)>> {
        Ok(self.entries.clone())
    }

    fn amplitude(&self, idx: u64) -> Result<Amplitude> {
        Ok(self.find(idx).unwrap_or_default())
    }

    fn norm_sqr(&self) -> Result<f64> {
        Ok(self.entries.iter().map(|e| e.1.norm_sqr()).sum())
    }

    fn hadamard(&mut self, bit: u64, eps: f64) -> Result<()> {
        let eps2 = eps * eps;
        let mut out = Vec::with_capacity(2 * self.entries.len());
        for &(idx, amp) in &self.entries {
            let (low, high) = if idx & bit == 0 {
                // Pair with the partner entry (if any) here; skip it when it comes up.
                let partner = self.find(idx | bit);
                let lo = amp * FRAC_1_SQRT_2;
                match partner {
                    Some(p) => {
                        let hi = p * FRAC_1_SQRT_2;
                        (lo + hi, lo - hi)
                    }
                    None => (lo, lo),
                }
            } else {
                if self.find(idx & !bit).is_some() {
                    continue;
                }
                let hi = amp * FRAC_1_SQRT_2;
                (hi, -hi)
            };
            let base = idx & !bit;
            if low.norm_sqr() >= eps2 {
                out.push((base, low));
            }
            if high.norm_sqr() >= eps2 {
                out.push((base | bit, high));
            }
        }
        self.entries = out;
        self.sort();
        Ok(())
    }

    fn rewrite(&mut self, rewrite: KeyRewrite) -> Result<()> {
        for entry in &mut self.entries {
            entry.0 = rewrite.apply(entry.0);
        }
        self.sort();
        Ok(())
    }

    fn negate_zero_pattern(&mut self, mask: u64) -> Result<()> {
        for entry in self.entries.iter_mut().filter(|e| e.0 & mask == 0) {
            entry.1 = -entry.1;
        }
        Ok(())
    }

    fn remove_where_set(&mut self, bit: u64) -> Result<f64> {
        let mut removed = 0.0;
        self.entries.retain(|e| {
            let keep = e.0 & bit == 0;
            if !keep {
                removed += e.1.norm_sqr();
            }
            keep
        });
        Ok(removed)
    }

    fn divide(&mut self, norm: f64) -> Result<()> {
        for entry in &mut self.entries {
            entry.1 /= norm;
        }
        Ok(())
    }

    fn prune(&mut self, eps: f64) -> Result<()> {
        let eps2 = eps * eps;
        self.entries.retain(|e| e.1.norm_sqr() >= eps2);
        Ok(())
    }

    fn diffusion(&mut self, mask: u64, eps: f64) -> Result<()> {
        let width = mask.count_ones();
        if width > MAX_DIFFUSION_QUBITS {
            return Err(Error::Capacity(format!(
                "diffusion over {width} qubits exceeds {MAX_DIFFUSION_QUBITS}"
            )));
        }
        let scale = 1.0 / (1u64 << width) as f64;
        let mut sums: BTreeMap<u64, Amplitude> = BTreeMap::new();
        for &(idx, amp) in &self.entries {
            *sums.entry(idx & !mask).or_default() += amp;
        }
        let eps2 = eps * eps;
        let mut out = Vec::new();
        for (group, sum) in sums {
            let mean = sum * scale;
            if mean.re == 0.0 && mean.im == 0.0 {
                for pattern in submasks(mask) {
                    if let Some(a) = self.find(group | pattern) {
                        out.push((group | pattern, -a));
                    }
                }
                continue;
            }
            let twice = mean * 2.0;
            for pattern in submasks(mask) {
                let idx = group | pattern;
                let value = twice - self.find(idx).unwrap_or_default();
                if value.norm_sqr() >= eps2 {
                    out.push((idx, value));
                }
            }
        }
        self.entries = out;
        self.sort();
        Ok(())
    }

    fn retain_largest(&mut self, limit: usize) -> Result<f64> {
        if self.entries.len() <= limit {
            return Ok(0.0);
        }
        self.entries.sort_by(|a, b| {
            b.1.norm_sqr()
                .total_cmp(&a.1.norm_sqr())
                .then(a.0.cmp(&b.0))
        });
        let removed = self.entries[limit..].iter().map(|e| e.1.norm_sqr()).sum();
        self.entries.truncate(limit);
        self.sort();
        Ok(removed)
    }
}
