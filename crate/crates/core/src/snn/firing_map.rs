use serde::{Deserialize, Serialize};

use crate::{CttmError, Result};

/// A single recorded firing: neuron `neuron` spiked during millisecond `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spike {
    pub t: u32,
    pub neuron: u32,
}

/// Boolean neuron-by-time raster, stored sparsely.
///
/// Entry `(n, t)` is set iff neuron `n` fired during millisecond `t`.
/// Spikes are kept sorted by `(t, neuron)` without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiringMap {
    n_neurons: usize,
    duration: u32,
    spikes: Vec<Spike>,
}

impl FiringMap {
    pub fn empty(n_neurons: usize, duration: u32) -> Self {
        FiringMap {
            n_neurons,
            duration,
            spikes: Vec::new(),
        }
    }

    pub fn from_spikes(n_neurons: usize, duration: u32, mut spikes: Vec<Spike>) -> Result<Self> {
        if let Some(bad) = spikes
            .iter()
            .find(|s| s.t >= duration || s.neuron as usize >= n_neurons)
        {
            return Err(CttmError::InvalidInput(format!(
                "spike {bad:?} outside a {n_neurons}x{duration} raster"
            )));
        }
        spikes.sort_unstable();
        spikes.dedup();
        Ok(FiringMap {
            n_neurons,
            duration,
            spikes,
        })
    }

    /// Spikes must already be sorted and in range.
    pub(crate) fn from_sorted(n_neurons: usize, duration: u32, spikes: Vec<Spike>) -> Self {
        debug_assert!(spikes.windows(2).all(|w| w[0] < w[1]));
        FiringMap {
            n_neurons,
            duration,
            spikes,
        }
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    /// Raster length T in milliseconds.
    pub fn duration(&self) -> u32 {
        self.duration
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn firing_count(&self) -> usize {
        self.spikes.len()
    }

    pub fn get(&self, neuron: usize, t: u32) -> bool {
        self.spikes
            .binary_search(&Spike {
                t,
                neuron: neuron as u32,
            })
            .is_ok()
    }

    pub fn counts_per_neuron(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_neurons];
        for s in &self.spikes {
            counts[s.neuron as usize] += 1;
        }
        counts
    }

    /// Firing times of one neuron, ascending.
    pub fn row(&self, neuron: usize) -> Vec<u32> {
        self.spikes
            .iter()
            .filter(|s| s.neuron as usize == neuron)
            .map(|s| s.t)
            .collect()
    }

    /// Concatenate `k` copies of the raster along time.
    pub fn tiled(&self, k: u32) -> FiringMap {
        let mut spikes = Vec::with_capacity(self.spikes.len() * k as usize);
        for rep in 0..k {
            spikes.extend(self.spikes.iter().map(|s| Spike {
                t: s.t + rep * self.duration,
                neuron: s.neuron,
            }));
        }
        FiringMap::from_sorted(self.n_neurons, self.duration * k, spikes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_spikes_sorts_and_dedups() {
        let m = FiringMap::from_spikes(
            4,
            10,
            vec![
                Spike { t: 3, neuron: 1 },
                Spike { t: 1, neuron: 2 },
                Spike { t: 3, neuron: 1 },
            ],
        )
        .unwrap();
        assert_eq!(m.firing_count(), 2);
        assert!(m.get(1, 3) && m.get(2, 1) && !m.get(0, 0));
        assert_eq!(m.counts_per_neuron(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(FiringMap::from_spikes(4, 10, vec![Spike { t: 10, neuron: 0 }]).is_err());
        assert!(FiringMap::from_spikes(4, 10, vec![Spike { t: 0, neuron: 4 }]).is_err());
    }

    #[test]
    fn tiling_repeats_in_time() {
        let m = FiringMap::from_spikes(2, 5, vec![Spike { t: 4, neuron: 1 }]).unwrap();
        let t = m.tiled(3);
        assert_eq!(t.duration(), 15);
        assert_eq!(t.row(1), vec![4, 9, 14]);
    }
}
