//! Per-channel movement, amplitude and frequency statistics of events
//! clamped to one standard deviation around the training mean.

use serde::{Deserialize, Serialize};

use crate::encoding::Matrix;
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub tag: FoldTag,
}

impl ChannelStats {
    /// Pooled per-channel mean and population std over all training rows.
    pub fn fit<'a>(events: impl IntoIterator<Item = &'a Matrix>, tag: FoldTag) -> Result<ChannelStats> {
        let mut sum: Vec<f64> = Vec::new();
        let mut sq: Vec<f64> = Vec::new();
        let mut n = 0usize;
        for m in events {
            if sum.is_empty() {
                sum = vec![0.0; m.cols()];
                sq = vec![0.0; m.cols()];
            } else if m.cols() != sum.len() {
                return Err(CttmError::InvalidInput("events differ in channel count".into()));
            }
            for r in 0..m.rows() {
                for (c, x) in m.row(r).iter().enumerate() {
                    sum[c] += x;
                    sq[c] += x * x;
                }
            }
            n += m.rows();
        }
        if n == 0 {
            return Err(CttmError::InvalidInput("no training rows".into()));
        }
        let nf = n as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
        let std = sq
            .iter()
            .zip(&mean)
            .map(|(q, m)| (q / nf - m * m).max(0.0).sqrt())
            .collect();
        Ok(ChannelStats { mean, std, tag })
    }
}

/// Clamp into `[mu - sigma, mu + sigma]` and map to `[0, 1]`; a zero-width
/// range maps to 0.
pub fn normalize_channel(x: &[f64], mu: f64, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![0.0; x.len()];
    }
    x.iter()
        .map(|v| (v.clamp(mu - sigma, mu + sigma) - (mu - sigma)) / (2.0 * sigma))
        .collect()
}

/// Mean absolute first difference.
pub fn movement(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (x.len() - 1) as f64
}

/// Mean absolute deviation from the mean.
pub fn amplitude(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m).abs()).sum::<f64>() / x.len() as f64
}

/// Fraction of consecutive first-difference pairs that change sign.
pub fn frequency(x: &[f64]) -> f64 {
    if x.len() < 3 {
        return 0.0;
    }
    let d: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let flips = d.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    flips as f64 / (d.len() - 1) as f64
}

/// Channel-major `[movement, amplitude, frequency]` triples.
pub fn ishii_extract(x: &Matrix, stats: &ChannelStats) -> Result<Vec<f64>> {
    if x.cols() != stats.mean.len() {
        return Err(CttmError::InvalidInput(format!(
            "event has {} channels, stats have {}",
            x.cols(),
            stats.mean.len()
        )));
    }
    let mut out = Vec::with_capacity(3 * x.cols());
    for c in 0..x.cols() {
        let v = normalize_channel(&x.column(c), stats.mean[c], stats.std[c]);
        out.extend([movement(&v), amplitude(&v), frequency(&v)]);
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(CttmError::NumericDomain("non-finite statistical feature".into()));
    }
    Ok(out)
}
