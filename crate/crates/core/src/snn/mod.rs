//! Izhikevich spiking networks: neuron dynamics, randomized topology with
//! axonal delays, millisecond simulation and STDP training.

mod firing_map;
mod network;
mod neuron;
mod simulate;
mod stdp;

pub use firing_map::{FiringMap, Spike};
pub use network::{make_network, Network, NetworkConfig, Synapse, WeightsFile};
pub use neuron::{neuron_step, NeuronParams, NeuronState, REST_POTENTIAL, SPIKE_THRESHOLD};
pub use simulate::{simulate_sample, Simulator, Stimulation, StimulusSchedule, SAMPLE_MS};
pub use stdp::{consolidate_weights, train_weights, StdpConfig, StdpState};
