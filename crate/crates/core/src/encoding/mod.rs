//! Raw event windows to SNN stimulus schedules: smoothing, channel
//! normalization, filter-bank expansion, chi-squared selection,
//! quantization and level-to-neuron mapping.

mod event;
mod filters;
mod mapping;
mod preprocess;
mod quantize;
mod selection;

pub use event::{prefix_len, Matrix, RawEvent, TurnLabel};
pub use filters::{apply_filter_bank, canny_1d, correlate_same, gabor_kernel, log_kernel, Filter};
pub use mapping::{build_schedule, level_neurons, LevelMap, NEURONS_PER_LEVEL};
pub use preprocess::{ewma_matrix, ewma_smooth, znormalize_channels, ChannelNormalizer, EWMA_ALPHA};
pub use quantize::{
    feature_fences, fit_fences, percentile, quantize_value, resample_event, resample_indices,
    QuantizerFences, LEVELS, MAX_INPUT_LEN,
};
pub use selection::{
    all_encodings, chi2_rank, chi2_select, chi2_statistic, equal_frequency_bins, EncodingId,
    FeatureSelection, SelectedFeature, CHI2_BINS,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::provenance::FoldTag;
use crate::snn::StimulusSchedule;
use crate::{derive_seed, CttmError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub ewma_alpha: f64,
    /// Number of (channel, filter) encodings kept (one network each).
    pub selected_features: usize,
    pub levels: usize,
    pub max_input_len: usize,
    pub neurons_per_level: usize,
    pub n_excitatory: usize,
    pub mapping_seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            ewma_alpha: EWMA_ALPHA,
            selected_features: 10,
            levels: LEVELS,
            max_input_len: MAX_INPUT_LEN,
            neurons_per_level: NEURONS_PER_LEVEL,
            n_excitatory: 200,
            mapping_seed: 0,
        }
    }
}

/// Smoothed and normalized event, the common input of all filters.
fn normalized(event: &RawEvent, alpha: f64, norm: &ChannelNormalizer) -> Result<Matrix> {
    norm.apply(&ewma_matrix(&event.samples, alpha)?)
}

/// Fitted transforms taking a raw event to its selected feature columns
/// and per-feature stimulus schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    pub config: EncoderConfig,
    pub normalizer: ChannelNormalizer,
    pub selection: FeatureSelection,
    pub fences: QuantizerFences,
    pub level_maps: Vec<LevelMap>,
    pub tag: FoldTag,
}

impl FeatureEncoder {
    /// Fit on training events only. Encodings whose training samples have
    /// coinciding 1st/99th percentiles cannot be quantized and are skipped
    /// in favour of the next-ranked encoding.
    pub fn fit(train: &[&RawEvent], config: &EncoderConfig, tag: FoldTag) -> Result<Self> {
        if train.is_empty() {
            return Err(CttmError::InvalidInput("no training events".into()));
        }
        let channels = train[0].channels();
        if train.iter().any(|e| e.channels() != channels || e.is_empty()) {
            return Err(CttmError::InvalidInput("training events must be non-empty with equal channel counts".into()));
        }
        if let Some(e) = train.iter().find(|e| tag.fold.is_some() && !tag.saw_subject(e.subject_id)) {
            return Err(CttmError::FoldLeakage(format!(
                "event {} of subject {} is outside the declared training subjects",
                e.event_id, e.subject_id
            )));
        }

        let smoothed = train
            .par_iter()
            .map(|e| ewma_matrix(&e.samples, config.ewma_alpha))
            .collect::<Result<Vec<_>>>()?;
        let normalizer = ChannelNormalizer::fit(&smoothed, tag.clone())?;
        let normed = smoothed
            .par_iter()
            .map(|m| normalizer.apply(m))
            .collect::<Result<Vec<_>>>()?;

        let encodings = all_encodings(channels);
        let means: Vec<Vec<f64>> = normed
            .par_iter()
            .map(|m| {
                let mut row = Vec::with_capacity(encodings.len());
                for c in 0..channels {
                    for enc in apply_filter_bank(&m.column(c)) {
                        row.push(enc.iter().sum::<f64>() / enc.len() as f64);
                    }
                }
                row
            })
            .collect();
        let labels: Vec<TurnLabel> = train.iter().map(|e| e.label).collect();
        let ranked = chi2_rank(&means, &labels, &encodings)?;

        let mut features = Vec::new();
        let mut r1 = Vec::new();
        let mut r99 = Vec::new();
        for cand in ranked {
            if features.len() == config.selected_features {
                break;
            }
            let values: Vec<f64> = normed
                .par_iter()
                .flat_map_iter(|m| cand.filter.apply(&m.column(cand.channel)))
                .collect();
            match feature_fences(&values) {
                Ok((lo, hi)) => {
                    features.push(cand);
                    r1.push(lo);
                    r99.push(hi);
                }
                Err(_) => log::debug!(
                    "skipping unquantizable encoding {}/{}",
                    cand.channel,
                    cand.filter.name()
                ),
            }
        }
        if features.len() < config.selected_features {
            return Err(CttmError::InvalidConfig(format!(
                "only {} quantizable encodings, {} requested",
                features.len(),
                config.selected_features
            )));
        }

        let level_maps = (0..features.len())
            .map(|i| {
                LevelMap::new(
                    derive_seed(config.mapping_seed, &[i as u64]),
                    config.levels,
                    config.neurons_per_level,
                    config.n_excitatory,
                )
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(FeatureEncoder {
            config: config.clone(),
            normalizer,
            selection: FeatureSelection {
                features,
                tag: tag.clone(),
            },
            fences: QuantizerFences {
                r1,
                r99,
                levels: config.levels,
                tag: tag.clone(),
            },
            level_maps,
            tag,
        })
    }

    pub fn n_features(&self) -> usize {
        self.selection.len()
    }

    fn check_consistent(&self) -> Result<()> {
        self.normalizer.tag.check_same(&self.tag)?;
        self.selection.tag.check_same(&self.tag)?;
        self.fences.tag.check_same(&self.tag)
    }

    /// The selected encodings of `event`, one column per feature.
    pub fn selected_columns(&self, event: &RawEvent) -> Result<Matrix> {
        self.check_consistent()?;
        if event.is_empty() {
            return Err(CttmError::InvalidInput(format!("event {} has no samples", event.event_id)));
        }
        let m = normalized(event, self.config.ewma_alpha, &self.normalizer)?;
        let cols: Vec<Vec<f64>> = self
            .selection
            .features
            .iter()
            .map(|f| f.filter.apply(&m.column(f.channel)))
            .collect();
        Matrix::from_columns(&cols)
    }

    /// Quantized levels per feature after resampling to the input limit.
    pub fn quantized_levels(&self, event: &RawEvent) -> Result<Vec<Vec<usize>>> {
        let cols = resample_event(&self.selected_columns(event)?, self.config.max_input_len);
        Ok((0..cols.cols())
            .map(|i| cols.column(i).iter().map(|&s| self.fences.quantize(i, s)).collect())
            .collect())
    }

    /// One stimulus schedule per selected feature.
    pub fn schedules(&self, event: &RawEvent) -> Result<Vec<StimulusSchedule>> {
        self.quantized_levels(event)?
            .iter()
            .zip(&self.level_maps)
            .map(|(levels, map)| build_schedule(levels, map))
            .collect()
    }
}
