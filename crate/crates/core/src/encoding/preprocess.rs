use serde::{Deserialize, Serialize};

use super::event::Matrix;
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

/// Default EWMA weight of the newest sample.
pub const EWMA_ALPHA: f64 = 0.2;

/// Exponentially weighted moving average: `y0 = x0`,
/// `yt = alpha * xt + (1 - alpha) * y(t-1)`.
pub fn ewma_smooth(signal: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(CttmError::InvalidInput("cannot smooth an empty series".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CttmError::InvalidConfig(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let mut out = Vec::with_capacity(signal.len());
    let mut y = signal[0];
    out.push(y);
    for &x in &signal[1..] {
        // same recurrence, exact on constant input
        y += alpha * (x - y);
        out.push(y);
    }
    Ok(out)
}

/// Smooth every column of an event matrix.
pub fn ewma_matrix(m: &Matrix, alpha: f64) -> Result<Matrix> {
    let cols = (0..m.cols())
        .map(|c| ewma_smooth(&m.column(c), alpha))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&cols)
}

/// Per-channel z-normalization statistics (population std).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelNormalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub tag: FoldTag,
}

impl ChannelNormalizer {
    /// Pool every sample of every event per channel. Zero-variance
    /// channels get std 1.
    pub fn fit<'a>(events: impl IntoIterator<Item = &'a Matrix>, tag: FoldTag) -> Result<Self> {
        let mut sum: Vec<f64> = Vec::new();
        let mut sum_sq: Vec<f64> = Vec::new();
        let mut count = 0usize;
        let mut all = Vec::new();
        for m in events {
            if sum.is_empty() {
                sum = vec![0.0; m.cols()];
                sum_sq = vec![0.0; m.cols()];
            } else if m.cols() != sum.len() {
                return Err(CttmError::InvalidInput("events differ in channel count".into()));
            }
            for r in 0..m.rows() {
                for (c, &x) in m.row(r).iter().enumerate() {
                    sum[c] += x;
                }
            }
            count += m.rows();
            all.push(m);
        }
        if count == 0 {
            return Err(CttmError::InvalidInput("no samples to normalize".into()));
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
        // Second pass on centred values for accuracy.
        for m in &all {
            for r in 0..m.rows() {
                for (c, &x) in m.row(r).iter().enumerate() {
                    let d = x - mean[c];
                    sum_sq[c] += d * d;
                }
            }
        }
        let std = sum_sq
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let sd = (s / count as f64).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    log::warn!("channel {c} has zero variance; using std 1");
                    1.0
                }
            })
            .collect();
        Ok(ChannelNormalizer { mean, std, tag })
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.mean.len() {
            return Err(CttmError::InvalidInput(format!(
                "normalizer fitted on {} channels, event has {}",
                self.mean.len(),
                m.cols()
            )));
        }
        let mut out = m.clone();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, c, (m.get(r, c) - self.mean[c]) / self.std[c]);
            }
        }
        Ok(out)
    }

    pub fn apply_channel(&self, channel: usize, series: &[f64]) -> Vec<f64> {
        series
            .iter()
            .map(|x| (x - self.mean[channel]) / self.std[channel])
            .collect()
    }
}

/// Fit a normalizer on `events` and return it with the transformed events.
pub fn znormalize_channels(events: &[Matrix], tag: FoldTag) -> Result<(ChannelNormalizer, Vec<Matrix>)> {
    let norm = ChannelNormalizer::fit(events, tag)?;
    let out = events.iter().map(|m| norm.apply(m)).collect::<Result<Vec<_>>>()?;
    Ok((norm, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ewma_examples() {
        assert_eq!(ewma_smooth(&[3.0, 3.0, 3.0], 0.2).unwrap(), vec![3.0, 3.0, 3.0]);
        assert_eq!(ewma_smooth(&[0.0, 1.0], 0.2).unwrap(), vec![0.0, 0.2]);
        let x = [1.5, -2.0, 7.25];
        assert_eq!(ewma_smooth(&x, 1.0).unwrap(), x.to_vec());
        assert!(ewma_smooth(&[], 0.2).is_err());
        assert!(ewma_smooth(&[1.0], 0.0).is_err());
    }

    #[test]
    fn znorm_examples() {
        let m = Matrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0]]).unwrap();
        let (norm, out) = znormalize_channels(&[m], FoldTag::default()).unwrap();
        let c0 = out[0].column(0);
        let mean: f64 = c0.iter().sum::<f64>() / 3.0;
        let var: f64 = c0.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-9 && (var - 1.0).abs() < 1e-6);
        assert_eq!(out[0].column(1), vec![0.0, 0.0, 0.0]);
        assert_eq!(norm.std[1], 1.0);

        // New data uses the training statistics (mean 2, std sqrt(2/3)).
        let test = Matrix::from_columns(&[vec![10.0], vec![6.0]]).unwrap();
        let t = norm.apply(&test).unwrap();
        assert!((t.get(0, 0) - 8.0 / (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(t.get(0, 1), 1.0);
    }

    #[test]
    fn pooled_over_events() {
        let a = Matrix::from_columns(&[vec![0.0, 2.0]]).unwrap();
        let b = Matrix::from_columns(&[vec![4.0, 6.0]]).unwrap();
        let (norm, _) = znormalize_channels(&[a, b], FoldTag::default()).unwrap();
        assert_eq!(norm.mean, vec![3.0]);
        assert!((norm.std[0] - 5.0f64.sqrt()).abs() < 1e-12);
    }
}
