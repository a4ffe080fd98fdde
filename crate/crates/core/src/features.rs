//! Normalized Histogram of Neuron Firings (NHNF) descriptors.

use serde::{Deserialize, Serialize};

use crate::provenance::FoldTag;
use crate::snn::FiringMap;
use crate::{CttmError, Result};

/// Default histogram bin count.
pub const NHNF_BINS: usize = 50;

/// Per-bin firing counts divided by the raster length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NhnfHistogram {
    pub values: Vec<f64>,
}

impl NhnfHistogram {
    pub fn bins(&self) -> usize {
        self.values.len()
    }
}

/// Bin `b` covers neurons `[b N / B, (b + 1) N / B)`; its value is the
/// number of firings of those neurons over the whole raster divided by T.
pub fn nhnf(map: &FiringMap, bins: usize) -> Result<NhnfHistogram> {
    let n = map.n_neurons();
    if bins == 0 || !n.is_multiple_of(bins) {
        return Err(CttmError::InvalidConfig(format!(
            "{bins} bins do not evenly divide {n} neurons"
        )));
    }
    if map.duration() == 0 {
        return Err(CttmError::InvalidInput("raster has zero duration".into()));
    }
    let per_bin = n / bins;
    let mut counts = vec![0usize; bins];
    for s in map.spikes() {
        counts[s.neuron as usize / per_bin] += 1;
    }
    let t = f64::from(map.duration());
    Ok(NhnfHistogram {
        values: counts.into_iter().map(|c| c as f64 / t).collect(),
    })
}

/// Channel-major concatenation of per-channel histograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor(pub Vec<f64>);

impl Descriptor {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn assemble_descriptor(histograms: &[NhnfHistogram]) -> Result<Descriptor> {
    let Some(first) = histograms.first() else {
        return Err(CttmError::InvalidInput("no channel histograms".into()));
    };
    if histograms.iter().any(|h| h.bins() != first.bins()) {
        return Err(CttmError::InvalidInput("channel histograms differ in bin count".into()));
    }
    Ok(Descriptor(
        histograms.iter().flat_map(|h| h.values.iter().copied()).collect(),
    ))
}

/// Per-dimension standardization fitted on training descriptors
/// (population std; zero-spread dimensions use std 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorNormalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub tag: FoldTag,
}

pub fn fit_normalizer(train: &[Descriptor], tag: FoldTag) -> Result<DescriptorNormalizer> {
    let Some(first) = train.first() else {
        return Err(CttmError::InvalidInput("no training descriptors".into()));
    };
    let d = first.len();
    if train.iter().any(|x| x.len() != d) {
        return Err(CttmError::InvalidInput("descriptors differ in length".into()));
    }
    let n = train.len() as f64;
    let mut mean = vec![0.0; d];
    for x in train {
        for (m, v) in mean.iter_mut().zip(x.as_slice()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for x in train {
        for ((s, v), m) in var.iter_mut().zip(x.as_slice()).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    Ok(DescriptorNormalizer { mean, std, tag })
}

impl DescriptorNormalizer {
    pub fn apply(&self, x: &Descriptor) -> Result<Descriptor> {
        if x.len() != self.mean.len() {
            return Err(CttmError::InvalidInput(format!(
                "descriptor of length {} for a normalizer of length {}",
                x.len(),
                self.mean.len()
            )));
        }
        Ok(Descriptor(
            x.as_slice()
                .iter()
                .zip(&self.mean)
                .zip(&self.std)
                .map(|((v, m), s)| (v - m) / s)
                .collect(),
        ))
    }
}

pub fn apply_normalizer(norm: &DescriptorNormalizer, x: &Descriptor) -> Result<Descriptor> {
    norm.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::Spike;

    #[test]
    fn empty_raster_gives_zero_histogram() {
        let h = nhnf(&FiringMap::empty(250, 250), 50).unwrap();
        assert_eq!(h.values, vec![0.0; 50]);
    }

    #[test]
    fn neuron_seven_example() {
        let spikes = (0..5).map(|k| Spike { t: 10 * k, neuron: 7 }).collect();
        let map = FiringMap::from_spikes(250, 250, spikes).unwrap();
        let h = nhnf(&map, 50).unwrap();
        assert_eq!(h.values[1], 0.02);
        assert_eq!(h.values.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn bin_count_must_divide() {
        assert!(matches!(
            nhnf(&FiringMap::empty(250, 250), 60),
            Err(CttmError::InvalidConfig(_))
        ));
    }

    #[test]
    fn descriptor_assembly() {
        let h = |v: f64| NhnfHistogram { values: vec![v; 50] };
        let hs: Vec<_> = (0..10).map(|i| h(i as f64)).collect();
        assert_eq!(assemble_descriptor(&hs).unwrap().len(), 500);
        assert_eq!(assemble_descriptor(&hs[..1]).unwrap().0, hs[0].values);
        let ab = assemble_descriptor(&[h(1.0), h(2.0)]).unwrap();
        let ba = assemble_descriptor(&[h(2.0), h(1.0)]).unwrap();
        assert_ne!(ab, ba);
        assert!(assemble_descriptor(&[]).is_err());
        assert!(assemble_descriptor(&[h(1.0), NhnfHistogram { values: vec![0.0; 3] }]).is_err());
    }

    #[test]
    fn normalizer_examples() {
        let train = vec![Descriptor(vec![0.0, 5.0]), Descriptor(vec![2.0, 5.0])];
        let norm = fit_normalizer(&train, FoldTag::default()).unwrap();
        let out: Vec<_> = train.iter().map(|d| norm.apply(d).unwrap()).collect();
        assert_eq!(out[0].0, vec![-1.0, 0.0]);
        assert_eq!(out[1].0, vec![1.0, 0.0]);
        assert!(fit_normalizer(&[], FoldTag::default()).is_err());
        assert!(norm.apply(&Descriptor(vec![1.0])).is_err());
    }
}
