use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::Network;
use super::simulate::{Simulator, StimulusSchedule, SAMPLE_MS};
use crate::{CttmError, Result};

/// STDP and consolidation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StdpConfig {
    pub a_plus: f64,
    pub a_minus: f64,
    /// Trace time constant (ms).
    pub tau: f64,
    pub weight_cap: f64,
    /// Constant added to every plastic weight at each consolidation.
    pub consolidation_rate: f64,
    /// Eligibility multiplier applied after each consolidation.
    pub eligibility_decay: f64,
    /// Simulated milliseconds between consolidations.
    pub consolidation_interval_ms: u32,
}

impl Default for StdpConfig {
    fn default() -> Self {
        StdpConfig {
            a_plus: 0.1,
            a_minus: 0.12,
            tau: 20.0,
            weight_cap: 10.0,
            consolidation_rate: 0.01,
            eligibility_decay: 0.9,
            consolidation_interval_ms: 1000,
        }
    }
}

impl StdpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_plus > 0.0 && self.a_minus > 0.0 && self.tau > 0.0) {
            return Err(CttmError::InvalidConfig(
                "a_plus, a_minus and tau must be positive".into(),
            ));
        }
        if !(self.weight_cap > 0.0) || !self.consolidation_rate.is_finite() {
            return Err(CttmError::InvalidConfig("invalid weight cap or consolidation rate".into()));
        }
        if !(0.0..=1.0).contains(&self.eligibility_decay) {
            return Err(CttmError::InvalidConfig("eligibility_decay must lie in [0, 1]".into()));
        }
        if self.consolidation_interval_ms == 0 {
            return Err(CttmError::InvalidConfig("consolidation_interval_ms must be positive".into()));
        }
        Ok(())
    }
}

/// Spike traces for nearest-spike STDP.
///
/// A neuron's trace is 1 at the millisecond it fires and decays by
/// `exp(-1/tau)` per millisecond. The last `max_delay + 1` trace vectors
/// and firing sets are kept so that a spike can be matched with its
/// arrival `delay` milliseconds later.
#[derive(Debug, Clone)]
pub struct StdpState {
    decay: f64,
    trace: Vec<f64>,
    trace_hist: Vec<f64>,
    fired_hist: Vec<Vec<u32>>,
    n: usize,
    slots: usize,
    next_t: u32,
}

impl StdpState {
    pub fn new(net: &Network, config: &StdpConfig) -> Self {
        let n = net.n_neurons();
        let slots = net.config.max_delay as usize + 1;
        StdpState {
            decay: (-1.0 / config.tau).exp(),
            trace: vec![0.0; n],
            trace_hist: vec![0.0; n * slots],
            fired_hist: vec![Vec::new(); slots],
            n,
            slots,
            next_t: 0,
        }
    }

    /// Forget all spike history (start of a new presentation).
    pub fn reset(&mut self) {
        self.trace.fill(0.0);
        self.trace_hist.fill(0.0);
        for f in &mut self.fired_hist {
            f.clear();
        }
        self.next_t = 0;
    }

    /// Trace value of `neuron` at millisecond `t` (must be within the kept window).
    fn trace_at(&self, neuron: usize, t: u32) -> f64 {
        self.trace_hist[(t as usize % self.slots) * self.n + neuron]
    }

    /// Process millisecond `t`, in which the neurons in `fired_now` spiked.
    ///
    /// Must be called for consecutive milliseconds starting at 0 after a
    /// reset. For each plastic synapse whose presynaptic spike arrives at
    /// `t`, eligibility drops by `a_minus` times the postsynaptic trace from
    /// before `t`; for each neuron firing at `t`, every plastic incoming
    /// synapse gains `a_plus` times the presynaptic trace at the time of
    /// arrival.
    pub(crate) fn step_raw(
        &mut self,
        net: &Network,
        eligibility: &mut [f64],
        config: &StdpConfig,
        fired_now: &[u32],
        t: u32,
    ) {
        debug_assert_eq!(t, self.next_t, "stdp steps must be consecutive");
        self.next_t = t + 1;

        // Depression: arrivals at t meet the postsynaptic trace before t.
        let max_back = (net.config.max_delay).min(t);
        for back in 1..=max_back {
            let src_t = t - back;
            let fired = &self.fired_hist[src_t as usize % self.slots];
            for &p in fired {
                if !net.is_excitatory(p as usize) {
                    continue;
                }
                for id in net.outgoing(p as usize) {
                    if net.delay[id] == back {
                        let post = net.post[id] as usize;
                        eligibility[id] -= config.a_minus * self.trace[post] * self.decay;
                    }
                }
            }
        }

        for x in self.trace.iter_mut() {
            *x *= self.decay;
        }
        for &n in fired_now {
            self.trace[n as usize] = 1.0;
        }
        let slot = t as usize % self.slots;
        self.trace_hist[slot * self.n..(slot + 1) * self.n].copy_from_slice(&self.trace);

        // Potentiation: postsynaptic firing at t after (or with) the arrival.
        for &post in fired_now {
            for &id in net.incoming(post as usize) {
                let id = id as usize;
                let pre = net.pre[id] as usize;
                if !net.is_excitatory(pre) {
                    continue;
                }
                let d = net.delay[id];
                if d <= t {
                    eligibility[id] += config.a_plus * self.trace_at(pre, t - d);
                }
            }
        }

        let hist = &mut self.fired_hist[slot];
        hist.clear();
        hist.extend_from_slice(fired_now);
    }

    /// [`StdpState::step_raw`] against the network's own eligibilities.
    pub fn stdp_step(&mut self, net: &mut Network, config: &StdpConfig, fired_now: &[u32], t: u32) {
        let mut elig = std::mem::take(&mut net.eligibility);
        self.step_raw(net, &mut elig, config, fired_now, t);
        net.eligibility = elig;
    }
}

/// Apply accumulated eligibility to every plastic weight:
/// `w <- clamp(w + consolidation_rate + eligibility, 0, cap)`, then decay
/// the eligibility. Inhibitory-source synapses are left alone.
pub fn consolidate_weights(net: &mut Network, config: &StdpConfig) {
    let cap = config.weight_cap.min(net.config.weight_cap);
    for id in 0..net.n_synapses() {
        if !net.is_plastic(id) {
            continue;
        }
        let w = net.weight[id] + config.consolidation_rate + net.eligibility[id];
        net.weight[id] = w.clamp(0.0, cap);
        net.eligibility[id] *= config.eligibility_decay;
    }
}

/// Unsupervised STDP training over `presentations` 250 ms samples.
///
/// Samples are drawn in repeated shuffled passes over `schedules`.
/// Neuron states, in-flight spikes and spike traces reset at every
/// presentation; weights consolidate once per simulated second.
pub fn train_weights(
    net: &mut Network,
    schedules: &[StimulusSchedule],
    presentations: usize,
    config: &StdpConfig,
    seed: u64,
) -> Result<()> {
    if schedules.is_empty() {
        return Err(CttmError::InvalidInput("no training schedules".into()));
    }
    config.validate()?;
    for s in schedules {
        s.validate(net.n_neurons())?;
    }
    if presentations == 0 {
        return Ok(());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = Vec::new();
    let mut sim = Simulator::new(net);
    let mut stdp = StdpState::new(net, config);
    let mut elig = std::mem::take(&mut net.eligibility);
    let mut clock_ms: u64 = 0;
    let interval = u64::from(config.consolidation_interval_ms);

    for _ in 0..presentations {
        if order.is_empty() {
            order.extend(0..schedules.len());
            order.shuffle(&mut rng);
            order.reverse();
        }
        let idx = order.pop().expect("refilled above");
        stdp.reset();
        let topo: &Network = net;
        let mut run = || {
            sim.run_with(topo, &schedules[idx], SAMPLE_MS, |t, fired| {
                stdp.step_raw(topo, &mut elig, config, fired, t);
            })
        };
        if let Err(e) = run() {
            net.eligibility = elig;
            return Err(e);
        }
        let before = clock_ms / interval;
        clock_ms += u64::from(SAMPLE_MS);
        for _ in before..clock_ms / interval {
            net.eligibility = std::mem::take(&mut elig);
            consolidate_weights(net, config);
            elig = std::mem::take(&mut net.eligibility);
        }
    }
    net.eligibility = elig;
    Ok(())
}
