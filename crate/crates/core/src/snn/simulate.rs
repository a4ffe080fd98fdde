use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::firing_map::{FiringMap, Spike};
use super::network::Network;
use super::neuron::{advance, NeuronState};
use crate::{CttmError, Result};

/// Default simulated length of one sample (ms).
pub const SAMPLE_MS: u32 = 250;

/// One millisecond of stimulation current delivered to one neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Stimulation {
    pub ms: u32,
    pub neuron: u32,
}

/// Which neurons receive the stimulus current at which millisecond.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StimulusSchedule {
    events: Vec<Stimulation>,
}

impl StimulusSchedule {
    pub fn new(mut events: Vec<Stimulation>) -> Self {
        events.sort_unstable();
        StimulusSchedule { events }
    }

    pub fn events(&self) -> &[Stimulation] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// One past the last stimulated millisecond (0 for an empty schedule).
    pub fn span(&self) -> u32 {
        self.events.last().map_or(0, |e| e.ms + 1)
    }

    pub fn validate(&self, n_neurons: usize) -> Result<()> {
        match self.events.iter().find(|e| e.neuron as usize >= n_neurons) {
            Some(e) => Err(CttmError::InvalidSchedule(format!(
                "stimulation of neuron {} at {} ms, network has {} neurons",
                e.neuron, e.ms, n_neurons
            ))),
            None => Ok(()),
        }
    }
}

/// Reusable scratch state for millisecond-resolution simulation.
///
/// Pending synaptic input lives in a ring of `max_delay + 1` slots, so a
/// spike emitted at `t` is first seen by its target at `t + delay`.
#[derive(Debug, Clone)]
pub struct Simulator {
    v: Vec<f64>,
    u: Vec<f64>,
    quiet: Vec<bool>,
    pending: Vec<f64>,
    input: Vec<f64>,
    fired: Vec<u32>,
    n: usize,
    slots: usize,
}

impl Simulator {
    pub fn new(net: &Network) -> Self {
        let n = net.n_neurons();
        let slots = net.config.max_delay as usize + 1;
        Simulator {
            v: vec![0.0; n],
            u: vec![0.0; n],
            quiet: vec![false; n],
            pending: vec![0.0; n * slots],
            input: vec![0.0; n],
            fired: Vec::new(),
            n,
            slots,
        }
    }

    fn reset(&mut self, net: &Network) {
        for (i, p) in net.params.iter().enumerate() {
            let rest = NeuronState::rest(p);
            self.v[i] = rest.v;
            self.u[i] = rest.u;
        }
        self.quiet.fill(false);
        self.pending.fill(0.0);
    }

    /// Simulate one sample from the reset state, calling `on_ms(t, fired)`
    /// after every millisecond.
    pub(crate) fn run_with<F>(
        &mut self,
        net: &Network,
        schedule: &StimulusSchedule,
        t_total: u32,
        mut on_ms: F,
    ) -> Result<FiringMap>
    where
        F: FnMut(u32, &[u32]),
    {
        if net.n_neurons() != self.n || net.config.max_delay as usize + 1 != self.slots {
            *self = Simulator::new(net);
        }
        schedule.validate(self.n)?;
        self.reset(net);

        let stim = net.config.stimulus_current;
        let mut noise = net.config.background_noise.filter(|sd| *sd > 0.0).map(|sd| {
            (
                ChaCha8Rng::seed_from_u64(net.seed ^ 0x6e6f_6973_6500),
                Normal::new(0.0, sd).expect("validated noise std"),
            )
        });
        let events = schedule.events();
        let mut next_event = 0;
        let mut spikes = Vec::new();

        for t in 0..t_total {
            let slot = (t as usize % self.slots) * self.n;
            let input = &mut self.input;
            input.copy_from_slice(&self.pending[slot..slot + self.n]);
            self.pending[slot..slot + self.n].fill(0.0);

            while next_event < events.len() && events[next_event].ms < t {
                next_event += 1;
            }
            while next_event < events.len() && events[next_event].ms == t {
                input[events[next_event].neuron as usize] += stim;
                next_event += 1;
            }
            if let Some((rng, dist)) = noise.as_mut() {
                for x in input.iter_mut() {
                    *x += dist.sample(rng);
                }
            }

            self.fired.clear();
            #[allow(clippy::needless_range_loop)]
            for n in 0..self.n {
                let i_in = input[n];
                if i_in == 0.0 && self.quiet[n] {
                    continue;
                }
                let (v0, u0) = (self.v[n], self.u[n]);
                let fired = advance(&mut self.v[n], &mut self.u[n], &net.params[n], i_in);
                if fired {
                    self.fired.push(n as u32);
                }
                self.quiet[n] = !fired && i_in == 0.0 && self.v[n] == v0 && self.u[n] == u0;
            }

            for &n in &self.fired {
                for id in net.outgoing(n as usize) {
                    let arrival = (t as usize + net.delay[id] as usize) % self.slots;
                    self.pending[arrival * self.n + net.post[id] as usize] += net.weight[id];
                }
                spikes.push(Spike { t, neuron: n });
            }
            on_ms(t, &self.fired);
        }
        Ok(FiringMap::from_sorted(self.n, t_total, spikes))
    }

    pub fn run(&mut self, net: &Network, schedule: &StimulusSchedule, t_total: u32) -> Result<FiringMap> {
        self.run_with(net, schedule, t_total, |_, _| {})
    }

    /// Membrane potentials after the last simulated millisecond.
    pub fn potentials(&self) -> &[f64] {
        &self.v
    }
}

/// Simulate `schedule` on `net` for `t_total` ms starting from the rest
/// state, without plasticity.
pub fn simulate_sample(net: &Network, schedule: &StimulusSchedule, t_total: u32) -> Result<FiringMap> {
    Simulator::new(net).run(net, schedule, t_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::network::{make_network, NetworkConfig, Synapse};

    fn two_neuron(delay: u32, weight: f64) -> Network {
        let cfg = NetworkConfig {
            n_excitatory: 2,
            n_inhibitory: 0,
            synapses_per_neuron: 1,
            ..Default::default()
        };
        Network::from_synapses(
            cfg,
            0,
            vec![Synapse { pre: 0, post: 1, weight, delay, eligibility: 0.0 }],
        )
        .unwrap()
    }

    #[test]
    fn empty_schedule_leaves_excitatory_silent() {
        // LTS cells reset to (-70, -17.5) are off their fixed point and
        // fire once while settling; nothing else is driven.
        let net = make_network(1, &NetworkConfig::default()).unwrap();
        let map = simulate_sample(&net, &StimulusSchedule::default(), SAMPLE_MS).unwrap();
        assert!(map.spikes().iter().all(|s| s.neuron >= 200));
        assert_eq!(map.counts_per_neuron()[200..], [1; 50]);
        assert_eq!((map.n_neurons(), map.duration()), (250, 250));
    }

    #[test]
    fn driven_neuron_fires() {
        let net = make_network(1, &NetworkConfig::default()).unwrap();
        let events = (0..200).map(|ms| Stimulation { ms, neuron: 17 }).collect();
        let map = simulate_sample(&net, &StimulusSchedule::new(events), SAMPLE_MS).unwrap();
        assert!(!map.row(17).is_empty());
    }

    #[test]
    fn rejects_out_of_range_neuron() {
        let net = make_network(1, &NetworkConfig::default()).unwrap();
        let s = StimulusSchedule::new(vec![Stimulation { ms: 0, neuron: 250 }]);
        assert!(matches!(simulate_sample(&net, &s, 250), Err(CttmError::InvalidSchedule(_))));
    }

    #[test]
    fn repeated_runs_identical() {
        let net = make_network(4, &NetworkConfig::default()).unwrap();
        let events = (0..40)
            .flat_map(|l| (0..5).map(move |j| Stimulation { ms: 5 * l + j, neuron: (7 * l + 3 * j) % 200 }))
            .collect();
        let s = StimulusSchedule::new(events);
        let mut sim = Simulator::new(&net);
        let a = sim.run(&net, &s, 250).unwrap();
        let b = sim.run(&net, &s, 250).unwrap();
        assert_eq!(a, b);
        assert!(a.firing_count() > 0);
    }

    #[test]
    fn delay_causality() {
        for delay in [1, 4, 13] {
            let net = two_neuron(delay, 10.0);
            let s = StimulusSchedule::new(vec![Stimulation { ms: 0, neuron: 0 }]);
            let mut sim = Simulator::new(&net);
            let pre_t = sim.run(&net, &s, 60).unwrap().row(0)[0];
            let arrival = pre_t + delay;
            // Through millisecond `arrival - 1` the target sits at rest.
            for t_total in 1..=arrival {
                sim.run(&net, &s, t_total).unwrap();
                assert_eq!(sim.potentials()[1], -70.0, "delay {delay} t_total {t_total}");
            }
            sim.run(&net, &s, arrival + 1).unwrap();
            assert!(sim.potentials()[1] > -70.0, "delay {delay}");
        }
    }
}
