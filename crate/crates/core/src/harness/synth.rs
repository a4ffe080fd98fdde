//! Synthetic multimodal turn-event generator.
//!
//! Channel layout: `[0, 5)` head-motion (gyro-like), `[5, 8)` audio-like
//! energy, `[8, 10)` muscle-activity-like, the rest slowly drifting
//! background sensors. Give events share one cross-channel motif; keep
//! events draw from several unrelated families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, DatasetProvenance};
use crate::encoding::{Matrix, RawEvent, TurnLabel};
use crate::{derive_seed, CttmError, Result};

pub const GYRO: std::ops::Range<usize> = 0..5;
pub const AUDIO: std::ops::Range<usize> = 5..8;
pub const MYO: std::ops::Range<usize> = 8..10;
const MOTIF_CHANNELS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub subjects: usize,
    /// Totals, spread as evenly as possible over subjects.
    pub give_events: usize,
    pub keep_events: usize,
    pub channels: usize,
    pub sample_rate_hz: f64,
    /// Event length range in samples, inclusive.
    pub min_len: usize,
    pub max_len: usize,
    /// Plateau height of the give-event head-motion ramp.
    pub ramp_amplitude: f64,
    /// Sigmoid steepness of the ramp, per sample.
    pub ramp_slope: f64,
    /// Ramp midpoint as a fraction of the event length.
    pub ramp_onset: f64,
    /// Half-width of the uniform onset shift (fraction of length), drawn
    /// per subject and again per event.
    pub onset_jitter: f64,
    /// Height of the late audio burst in give events.
    pub burst_amplitude: f64,
    /// Number of keep-event families in use, 1 to 5.
    pub keep_families: usize,
    /// Typical signal height of keep-event motifs.
    pub keep_amplitude: f64,
    /// Relative spread of the per-subject channel gain.
    pub subject_gain_spread: f64,
    /// Spread of the per-subject channel offset.
    pub subject_offset_spread: f64,
    pub noise_std: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: 7,
            subjects: 12,
            give_events: 846,
            keep_events: 1305,
            channels: 50,
            sample_rate_hz: 20.0,
            min_len: 20,
            max_len: 40,
            ramp_amplitude: 2.0,
            ramp_slope: 0.8,
            ramp_onset: 0.10,
            onset_jitter: 0.05,
            burst_amplitude: 2.0,
            keep_families: 5,
            keep_amplitude: 1.5,
            subject_gain_spread: 0.25,
            subject_offset_spread: 0.3,
            noise_std: 0.3,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CttmError::InvalidConfig(m.into()));
        if self.subjects == 0 || self.give_events == 0 || self.keep_events == 0 {
            return bad("subject and event counts must be at least 1");
        }
        if self.channels < MOTIF_CHANNELS {
            return bad("at least 10 channels are needed for the motif layout");
        }
        if self.min_len < 2 || self.max_len < self.min_len {
            return bad("event lengths must satisfy 2 <= min_len <= max_len");
        }
        if !(self.sample_rate_hz > 0.0) {
            return bad("sample rate must be positive");
        }
        if !(1..=5).contains(&self.keep_families) {
            return bad("keep_families must be between 1 and 5");
        }
        let nonneg = [
            self.ramp_amplitude,
            self.ramp_slope,
            self.onset_jitter,
            self.burst_amplitude,
            self.keep_amplitude,
            self.subject_gain_spread,
            self.subject_offset_spread,
            self.noise_std,
        ];
        if nonneg.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("amplitudes, spreads and noise std must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.ramp_onset) {
            return bad("ramp_onset must lie in [0, 1)");
        }
        Ok(())
    }
}

struct Subject {
    gain: Vec<f64>,
    offset: Vec<f64>,
    onset_shift: f64,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn bump(t: f64, center: f64, width: f64) -> f64 {
    let z = (t - center) / width;
    (-0.5 * z * z).exp()
}

fn give_motif(x: &mut Matrix, cfg: &SyntheticConfig, onset: f64) {
    let len = x.rows() as f64;
    let mid = onset * len;
    let burst = 0.8 * len;
    let step = 0.35 * len;
    for t in 0..x.rows() {
        let tf = t as f64;
        let ramp = cfg.ramp_amplitude * sigmoid(cfg.ramp_slope * (tf - mid));
        for (k, c) in GYRO.enumerate() {
            let w = 1.0 - 0.1 * k as f64;
            x.set(t, c, x.get(t, c) + w * ramp);
        }
        let b = cfg.burst_amplitude * bump(tf, burst, 0.06 * len);
        for c in AUDIO {
            x.set(t, c, x.get(t, c) + b);
        }
        let m = 0.5 * cfg.ramp_amplitude * sigmoid(2.0 * (tf - step));
        for c in MYO {
            x.set(t, c, x.get(t, c) + m);
        }
    }
}

fn keep_motif(x: &mut Matrix, cfg: &SyntheticConfig, family: usize, rng: &mut ChaCha8Rng) {
    let len = x.rows() as f64;
    let a = cfg.keep_amplitude * rng.gen_range(0.7..1.3);
    match family {
        // head oscillation
        0 => {
            let period = rng.gen_range(5.0..12.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            for t in 0..x.rows() {
                let s = a * (std::f64::consts::TAU * t as f64 / period + phase).sin();
                for c in GYRO {
                    x.set(t, c, x.get(t, c) + s);
                }
            }
        }
        // head moving the other way
        1 => {
            let mid = rng.gen_range(0.1..0.6) * len;
            for t in 0..x.rows() {
                let s = -a * sigmoid(0.6 * (t as f64 - mid));
                for c in GYRO {
                    x.set(t, c, x.get(t, c) + s);
                }
            }
        }
        // muscle bursts
        2 => {
            let n = rng.gen_range(1..4);
            for _ in 0..n {
                let center = rng.gen_range(0.0..len);
                for t in 0..x.rows() {
                    let s = 1.5 * a * bump(t as f64, center, 1.5);
                    for c in MYO {
                        x.set(t, c, x.get(t, c) + s);
                    }
                }
            }
        }
        // quiet
        3 => {}
        // early speech
        _ => {
            let center = rng.gen_range(0.05..0.4) * len;
            for t in 0..x.rows() {
                let s = a * bump(t as f64, center, 0.08 * len);
                for c in AUDIO {
                    x.set(t, c, x.get(t, c) + s);
                }
            }
        }
    }
}

/// Spread `total` over `parts` as evenly as possible, earlier parts first.
fn spread(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

pub fn gen_synthetic(cfg: &SyntheticConfig) -> Result<Dataset> {
    cfg.validate()?;
    let gives = spread(cfg.give_events, cfg.subjects);
    let keeps = spread(cfg.keep_events, cfg.subjects);
    let noise = Normal::new(0.0, cfg.noise_std.max(f64::MIN_POSITIVE))
        .map_err(|e| CttmError::InvalidConfig(e.to_string()))?;
    let mut events = Vec::with_capacity(cfg.give_events + cfg.keep_events);
    let mut next_id = 0u64;

    for s in 0..cfg.subjects {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[s as u64]));
        let subject = Subject {
            gain: (0..cfg.channels)
                .map(|_| 1.0 + cfg.subject_gain_spread * rng.gen_range(-1.0..=1.0))
                .collect(),
            offset: (0..cfg.channels)
                .map(|_| cfg.subject_offset_spread * rng.gen_range(-1.0..=1.0))
                .collect(),
            onset_shift: cfg.onset_jitter * rng.gen_range(-1.0..=1.0),
        };
        let mut labels: Vec<TurnLabel> = std::iter::repeat_n(TurnLabel::Give, gives[s])
            .chain(std::iter::repeat_n(TurnLabel::Keep, keeps[s]))
            .collect();
        rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);

        for label in labels {
            let len = rng.gen_range(cfg.min_len..=cfg.max_len);
            let mut x = Matrix::zeros(len, cfg.channels);
            // background drift: AR(1) on every channel
            for c in 0..cfg.channels {
                let mut v = 0.0;
                for t in 0..len {
                    v = 0.8 * v + cfg.noise_std * rng.gen_range(-1.0..1.0);
                    if c >= MOTIF_CHANNELS {
                        x.set(t, c, v);
                    }
                }
            }
            match label {
                TurnLabel::Give => {
                    let onset = cfg.ramp_onset + subject.onset_shift + cfg.onset_jitter * rng.gen_range(-1.0..=1.0);
                    give_motif(&mut x, cfg, onset);
                }
                TurnLabel::Keep => {
                    let family = rng.gen_range(0..cfg.keep_families);
                    keep_motif(&mut x, cfg, family, &mut rng);
                }
            }
            for t in 0..len {
                for c in 0..cfg.channels {
                    let n = if cfg.noise_std > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    let v = subject.gain[c] * (x.get(t, c) + n) + subject.offset[c];
                    x.set(t, c, v);
                }
            }
            events.push(RawEvent {
                event_id: next_id,
                subject_id: s as u32,
                label,
                samples: x,
            });
            next_id += 1;
        }
    }
    Dataset::new(events, DatasetProvenance::Synthetic { config: cfg.clone() })
}
