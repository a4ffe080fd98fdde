use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::snn::{Stimulation, StimulusSchedule};
use crate::{CttmError, Result};

/// Neurons stimulated for each active level.
pub const NEURONS_PER_LEVEL: usize = 5;

/// Assignment of quantization levels to disjoint groups of excitatory
/// neurons: a seeded permutation of the excitatory indices cut into
/// consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMap {
    pub seed: u64,
    pub groups: Vec<Vec<u32>>,
}

impl LevelMap {
    pub fn new(seed: u64, levels: usize, per_level: usize, n_excitatory: usize) -> Result<Self> {
        if levels == 0 || per_level == 0 || levels * per_level > n_excitatory {
            return Err(CttmError::InvalidConfig(format!(
                "{levels} levels x {per_level} neurons do not fit {n_excitatory} excitatory neurons"
            )));
        }
        let mut perm: Vec<u32> = (0..n_excitatory as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let groups = perm
            .chunks(per_level)
            .take(levels)
            .map(<[u32]>::to_vec)
            .collect();
        Ok(LevelMap { seed, groups })
    }

    /// The paper-sized map: 40 levels x 5 neurons over 200 excitatory neurons.
    pub fn standard(seed: u64) -> Self {
        LevelMap::new(seed, 40, NEURONS_PER_LEVEL, 200).expect("static sizes")
    }

    pub fn levels(&self) -> usize {
        self.groups.len()
    }

    pub fn level_neurons(&self, q: usize) -> Result<&[u32]> {
        self.groups
            .get(q)
            .map(Vec::as_slice)
            .ok_or(CttmError::InvalidLevel {
                level: q,
                levels: self.groups.len(),
            })
    }
}

/// Neurons representing level `q` in the standard map for `channel_seed`.
pub fn level_neurons(q: usize, channel_seed: u64) -> Result<Vec<u32>> {
    LevelMap::standard(channel_seed).level_neurons(q).map(<[u32]>::to_vec)
}

/// Sample `l` occupies milliseconds `[5l, 5l + 5)`; neuron `j` of its
/// level group is stimulated at `5l + j`.
pub fn build_schedule(levels: &[usize], map: &LevelMap) -> Result<StimulusSchedule> {
    let mut events = Vec::with_capacity(levels.len() * NEURONS_PER_LEVEL);
    for (l, &q) in levels.iter().enumerate() {
        let group = map.level_neurons(q)?;
        let slot = group.len().max(NEURONS_PER_LEVEL) as u32;
        for (j, &neuron) in group.iter().enumerate() {
            events.push(Stimulation {
                ms: slot * l as u32 + j as u32,
                neuron,
            });
        }
    }
    Ok(StimulusSchedule::new(events))
}
