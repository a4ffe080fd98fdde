use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::neuron::NeuronParams;
use crate::{check_format_version, CttmError, Result, FORMAT_VERSION};

/// Sizes and constants of one channel network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    pub n_excitatory: usize,
    pub n_inhibitory: usize,
    pub synapses_per_neuron: usize,
    /// Excitatory conduction delays are drawn uniformly from `1..=max_delay` ms.
    pub max_delay: u32,
    pub excitatory_weight: f64,
    pub inhibitory_weight: f64,
    pub weight_cap: f64,
    /// Current (mA) injected into a stimulated neuron for one millisecond.
    pub stimulus_current: f64,
    /// Standard deviation of a Gaussian background current; `None` disables it.
    pub background_noise: Option<f64>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            n_excitatory: 200,
            n_inhibitory: 50,
            synapses_per_neuron: 25,
            max_delay: 20,
            excitatory_weight: 6.0,
            inhibitory_weight: -5.0,
            weight_cap: 10.0,
            stimulus_current: 20.0,
            background_noise: None,
        }
    }
}

impl NetworkConfig {
    pub fn n_neurons(&self) -> usize {
        self.n_excitatory + self.n_inhibitory
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CttmError::InvalidConfig(m.to_string()));
        if self.n_excitatory == 0 {
            return bad("n_excitatory must be positive");
        }
        if self.synapses_per_neuron == 0 {
            return bad("synapses_per_neuron must be positive");
        }
        if self.max_delay == 0 {
            return bad("max_delay must be positive");
        }
        if self.synapses_per_neuron >= self.n_neurons() {
            return bad("synapses_per_neuron must be below the neuron count");
        }
        if self.n_inhibitory > 0 && self.synapses_per_neuron > self.n_excitatory {
            return bad("inhibitory fan-out exceeds the excitatory population");
        }
        if !(self.weight_cap > 0.0) || !(self.excitatory_weight >= 0.0) {
            return bad("weights must be non-negative with a positive cap");
        }
        if self.excitatory_weight > self.weight_cap {
            return bad("initial excitatory weight exceeds the cap");
        }
        if !(self.inhibitory_weight <= 0.0) {
            return bad("inhibitory_weight must be non-positive");
        }
        if let Some(sd) = self.background_noise {
            if !(sd >= 0.0) {
                return bad("background_noise must be non-negative");
            }
        }
        Ok(())
    }
}

/// A plain view of one synapse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Synapse {
    pub pre: u32,
    pub post: u32,
    pub weight: f64,
    /// Conduction delay in whole milliseconds.
    pub delay: u32,
    /// Accumulated STDP weight derivative, applied at consolidation.
    pub eligibility: f64,
}

/// Topology, neuron parameters and synaptic weights of one channel network.
///
/// Neurons `0..n_excitatory` are RS excitatory, the rest LTS inhibitory.
/// Synapses are stored column-wise and grouped by presynaptic neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub(crate) config: NetworkConfig,
    pub(crate) seed: u64,
    pub(crate) params: Vec<NeuronParams>,
    pub(crate) pre: Vec<u32>,
    pub(crate) post: Vec<u32>,
    pub(crate) delay: Vec<u32>,
    pub(crate) weight: Vec<f64>,
    pub(crate) eligibility: Vec<f64>,
    /// `out_offsets[n]..out_offsets[n + 1]` are the synapses leaving `n`.
    pub(crate) out_offsets: Vec<usize>,
    /// `in_offsets[n]..in_offsets[n + 1]` index `in_ids` for synapses into `n`.
    pub(crate) in_offsets: Vec<usize>,
    pub(crate) in_ids: Vec<u32>,
}

/// Build the randomized network for `seed`.
///
/// Excitatory neurons project to distinct targets drawn uniformly from all
/// other neurons with delays uniform in `1..=max_delay`; inhibitory neurons
/// project to distinct excitatory targets with delay 1.
pub fn make_network(seed: u64, config: &NetworkConfig) -> Result<Network> {
    config.validate()?;
    let n = config.n_neurons();
    let k = config.synapses_per_neuron;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut synapses = Vec::with_capacity(n * k);
    for pre in 0..n {
        if pre < config.n_excitatory {
            for idx in index::sample(&mut rng, n - 1, k).into_iter() {
                let post = if idx >= pre { idx + 1 } else { idx };
                let delay = rng.gen_range(1..=config.max_delay);
                synapses.push((pre, post, config.excitatory_weight, delay));
            }
        } else {
            for post in index::sample(&mut rng, config.n_excitatory, k).into_iter() {
                synapses.push((pre, post, config.inhibitory_weight, 1));
            }
        }
    }
    let synapses = synapses
        .into_iter()
        .map(|(pre, post, weight, delay)| Synapse {
            pre: pre as u32,
            post: post as u32,
            weight,
            delay,
            eligibility: 0.0,
        })
        .collect();
    Network::from_synapses(config.clone(), seed, synapses)
}

impl Network {
    /// Assemble a network from an explicit synapse list (used for small
    /// hand-built circuits). Synapses are regrouped by presynaptic neuron,
    /// keeping their relative order.
    pub fn from_synapses(config: NetworkConfig, seed: u64, mut synapses: Vec<Synapse>) -> Result<Self> {
        if config.n_excitatory == 0 || config.max_delay == 0 {
            return Err(CttmError::InvalidConfig(
                "network needs excitatory neurons and a positive max_delay".into(),
            ));
        }
        let n = config.n_neurons();
        for s in &synapses {
            if s.pre as usize >= n || s.post as usize >= n {
                return Err(CttmError::InvalidInput(format!("synapse {s:?} references a missing neuron")));
            }
            if s.delay == 0 || s.delay > config.max_delay {
                return Err(CttmError::InvalidInput(format!(
                    "synapse delay {} outside 1..={}",
                    s.delay, config.max_delay
                )));
            }
            if !s.weight.is_finite() || !s.eligibility.is_finite() {
                return Err(CttmError::NumericDomain(format!("non-finite synapse {s:?}")));
            }
        }
        synapses.sort_by_key(|s| s.pre);

        let mut out_offsets = vec![0usize; n + 1];
        for s in &synapses {
            out_offsets[s.pre as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut in_lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (id, s) in synapses.iter().enumerate() {
            in_lists[s.post as usize].push(id as u32);
        }
        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        let mut in_ids = Vec::with_capacity(synapses.len());
        for list in in_lists {
            in_ids.extend(list);
            in_offsets.push(in_ids.len());
        }

        let params = (0..n)
            .map(|i| {
                if i < config.n_excitatory {
                    NeuronParams::RS
                } else {
                    NeuronParams::LTS
                }
            })
            .collect();
        Ok(Network {
            seed,
            params,
            pre: synapses.iter().map(|s| s.pre).collect(),
            post: synapses.iter().map(|s| s.post).collect(),
            delay: synapses.iter().map(|s| s.delay).collect(),
            weight: synapses.iter().map(|s| s.weight).collect(),
            eligibility: synapses.iter().map(|s| s.eligibility).collect(),
            out_offsets,
            in_offsets,
            in_ids,
            config,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_neurons(&self) -> usize {
        self.params.len()
    }

    pub fn n_synapses(&self) -> usize {
        self.pre.len()
    }

    pub fn params(&self, neuron: usize) -> &NeuronParams {
        &self.params[neuron]
    }

    pub fn is_excitatory(&self, neuron: usize) -> bool {
        neuron < self.config.n_excitatory
    }

    /// Whether synapse `id` is subject to STDP (its source is excitatory).
    pub fn is_plastic(&self, id: usize) -> bool {
        self.is_excitatory(self.pre[id] as usize)
    }

    pub fn synapse(&self, id: usize) -> Synapse {
        Synapse {
            pre: self.pre[id],
            post: self.post[id],
            weight: self.weight[id],
            delay: self.delay[id],
            eligibility: self.eligibility[id],
        }
    }

    pub fn synapses(&self) -> impl Iterator<Item = Synapse> + '_ {
        (0..self.n_synapses()).map(|i| self.synapse(i))
    }

    pub fn outgoing(&self, neuron: usize) -> std::ops::Range<usize> {
        self.out_offsets[neuron]..self.out_offsets[neuron + 1]
    }

    pub fn incoming(&self, neuron: usize) -> &[u32] {
        &self.in_ids[self.in_offsets[neuron]..self.in_offsets[neuron + 1]]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn eligibilities(&self) -> &[f64] {
        &self.eligibility
    }

    pub fn set_weight(&mut self, id: usize, weight: f64) {
        self.weight[id] = weight;
    }

    pub fn set_eligibility(&mut self, id: usize, value: f64) {
        self.eligibility[id] = value;
    }

    pub fn to_weights_file(&self) -> WeightsFile {
        WeightsFile {
            format_version: FORMAT_VERSION,
            seed: self.seed,
            config: self.config.clone(),
            weights: self.weight.clone(),
            eligibility: self.eligibility.clone(),
        }
    }

    /// Rebuild the topology from the stored seed and install the weights.
    pub fn from_weights_file(file: &WeightsFile) -> Result<Network> {
        check_format_version(file.format_version)?;
        let mut net = make_network(file.seed, &file.config)?;
        if file.weights.len() != net.n_synapses() || file.eligibility.len() != net.n_synapses() {
            return Err(CttmError::InvalidInput(format!(
                "weights file holds {} weights, network has {} synapses",
                file.weights.len(),
                net.n_synapses()
            )));
        }
        net.weight.clone_from(&file.weights);
        net.eligibility.clone_from(&file.eligibility);
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(&self.to_weights_file())?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Network> {
        let file: WeightsFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Network::from_weights_file(&file)
    }
}

/// Serialized trained network: the seed regenerates the topology, weights
/// are listed in synapse order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub format_version: u32,
    pub seed: u64,
    pub config: NetworkConfig,
    pub weights: Vec<f64>,
    pub eligibility: Vec<f64>,
}
