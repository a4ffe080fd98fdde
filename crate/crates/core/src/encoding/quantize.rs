use serde::{Deserialize, Serialize};

use super::event::Matrix;
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

/// Default number of quantization levels.
pub const LEVELS: usize = 40;

/// Longest sample sequence fed to a network.
pub const MAX_INPUT_LEN: usize = 40;

/// Empirical percentile `p` in `[0, 100]` with linear interpolation
/// between order statistics (position `(n - 1) p / 100`).
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(CttmError::InvalidInput("percentile of an empty set".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, p))
}

fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p / 100.0;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Per-feature outlier fences `[r1, r99]` and the level count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerFences {
    pub r1: Vec<f64>,
    pub r99: Vec<f64>,
    pub levels: usize,
    pub tag: FoldTag,
}

impl QuantizerFences {
    pub fn len(&self) -> usize {
        self.r1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r1.is_empty()
    }

    pub fn quantize(&self, feature: usize, s: f64) -> usize {
        quantize_value(s, self.r1[feature], self.r99[feature], self.levels)
    }
}

/// Fences of a single feature.
pub fn feature_fences(values: &[f64]) -> Result<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() < 2 || sorted[0] == sorted[sorted.len() - 1] {
        return Err(CttmError::InvalidFeature(
            "feature needs at least two distinct values".into(),
        ));
    }
    let r1 = percentile_sorted(&sorted, 1.0);
    let r99 = percentile_sorted(&sorted, 99.0);
    if !(r1 < r99) {
        return Err(CttmError::InvalidFeature(format!(
            "degenerate fences r1={r1} r99={r99}"
        )));
    }
    Ok((r1, r99))
}

/// Fit fences on all training samples of each selected feature column.
pub fn fit_fences(features: &[Vec<f64>], levels: usize, tag: FoldTag) -> Result<QuantizerFences> {
    if levels == 0 {
        return Err(CttmError::InvalidConfig("levels must be positive".into()));
    }
    let mut r1 = Vec::with_capacity(features.len());
    let mut r99 = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let (lo, hi) = feature_fences(f)
            .map_err(|e| CttmError::InvalidFeature(format!("feature {i}: {e}")))?;
        r1.push(lo);
        r99.push(hi);
    }
    Ok(QuantizerFences { r1, r99, levels, tag })
}

/// `floor((s - r1) / (r99 - r1) * levels)` clamped to `[0, levels - 1]`.
pub fn quantize_value(s: f64, r1: f64, r99: f64, levels: usize) -> usize {
    let q = ((s - r1) / (r99 - r1) * levels as f64).floor();
    if q.is_nan() || q < 0.0 {
        0
    } else if q >= (levels - 1) as f64 {
        levels - 1
    } else {
        q as usize
    }
}

/// Row indices that downsample `len` rows to at most `max_len`, keeping the
/// first and last rows. Identity when `len <= max_len`.
pub fn resample_indices(len: usize, max_len: usize) -> Vec<usize> {
    if len <= max_len {
        return (0..len).collect();
    }
    if max_len == 1 {
        return vec![0];
    }
    (0..max_len)
        .map(|i| {
            let pos = i as f64 * (len - 1) as f64 / (max_len - 1) as f64;
            pos.round() as usize
        })
        .collect()
}

pub fn resample_event(rows: &Matrix, max_len: usize) -> Matrix {
    rows.select_rows(&resample_indices(rows.rows(), max_len))
}
