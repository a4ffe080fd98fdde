use serde::{Deserialize, Serialize};

use super::event::TurnLabel;
use super::filters::Filter;
use crate::provenance::FoldTag;
use crate::{CttmError, Result};

/// Number of equal-frequency bins used to discretize event means.
pub const CHI2_BINS: usize = 10;

/// One (channel, filter) encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingId {
    pub channel: usize,
    pub filter: Filter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    pub channel: usize,
    pub filter: Filter,
    pub chi2: f64,
}

impl SelectedFeature {
    pub fn id(&self) -> EncodingId {
        EncodingId {
            channel: self.channel,
            filter: self.filter,
        }
    }
}

/// The retained encodings, strongest association first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub features: Vec<SelectedFeature>,
    pub tag: FoldTag,
}

impl FeatureSelection {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Bin index of every value under `bins` equal-frequency bins.
///
/// Cut points are the order statistics at ranks `floor(k n / bins)`;
/// a value's bin is the number of cut points not above it, so equal
/// values always share a bin.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let cuts: Vec<f64> = (1..bins).map(|k| sorted[(k * n / bins).min(n - 1)]).collect();
    values
        .iter()
        .map(|v| cuts.partition_point(|c| c <= v))
        .collect()
}

/// Pearson chi-squared statistic of the bins x labels contingency table.
pub fn chi2_statistic(values: &[f64], labels: &[TurnLabel], bins: usize) -> Result<f64> {
    if values.len() != labels.len() {
        return Err(CttmError::InvalidInput("values and labels differ in length".into()));
    }
    if values.is_empty() {
        return Err(CttmError::InvalidInput("no events".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CttmError::NumericDomain("non-finite encoding mean".into()));
    }
    let idx = equal_frequency_bins(values, bins);
    let mut table = vec![[0.0f64; 2]; bins];
    for (b, l) in idx.iter().zip(labels) {
        table[*b][l.as_u8() as usize] += 1.0;
    }
    let n = values.len() as f64;
    let col = [
        table.iter().map(|r| r[0]).sum::<f64>(),
        table.iter().map(|r| r[1]).sum::<f64>(),
    ];
    let mut chi2 = 0.0;
    for row in &table {
        let rt = row[0] + row[1];
        if rt == 0.0 {
            continue;
        }
        for j in 0..2 {
            let expected = rt * col[j] / n;
            if expected > 0.0 {
                chi2 += (row[j] - expected).powi(2) / expected;
            }
        }
    }
    Ok(chi2)
}

/// Score every encoding; `event_means[k][e]` is the mean of encoding `e`
/// over event `k`. Returned in descending statistic order (ties keep the
/// encoding order).
pub fn chi2_rank(
    event_means: &[Vec<f64>],
    labels: &[TurnLabel],
    encodings: &[EncodingId],
) -> Result<Vec<SelectedFeature>> {
    if event_means.len() != labels.len() {
        return Err(CttmError::InvalidInput("one label per event required".into()));
    }
    if event_means.iter().any(|r| r.len() != encodings.len()) {
        return Err(CttmError::InvalidInput("event means do not match the encoding list".into()));
    }
    let mut scored = encodings
        .iter()
        .enumerate()
        .map(|(e, id)| {
            let column: Vec<f64> = event_means.iter().map(|r| r[e]).collect();
            Ok(SelectedFeature {
                channel: id.channel,
                filter: id.filter,
                chi2: chi2_statistic(&column, labels, CHI2_BINS)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.chi2.total_cmp(&a.chi2));
    Ok(scored)
}

/// Keep the `m` encodings with the largest statistics.
pub fn chi2_select(
    event_means: &[Vec<f64>],
    labels: &[TurnLabel],
    encodings: &[EncodingId],
    m: usize,
    tag: FoldTag,
) -> Result<FeatureSelection> {
    if m == 0 || m > encodings.len() {
        return Err(CttmError::InvalidConfig(format!(
            "cannot select {m} of {} encodings",
            encodings.len()
        )));
    }
    let mut ranked = chi2_rank(event_means, labels, encodings)?;
    ranked.truncate(m);
    Ok(FeatureSelection { features: ranked, tag })
}

/// Every (channel, filter) pair for `channels` channels, channel-major.
pub fn all_encodings(channels: usize) -> Vec<EncodingId> {
    (0..channels)
        .flat_map(|channel| Filter::ALL.iter().map(move |&filter| EncodingId { channel, filter }))
        .collect()
}
