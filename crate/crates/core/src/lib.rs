//! Early turn-taking prediction with per-channel spiking neural networks.
//!
//! Raw multimodal event windows are smoothed, normalized, expanded with a
//! 1-D filter bank and reduced to the most label-associated encodings
//! ([`encoding`]). Each selected column is quantized and drives its own
//! Izhikevich network trained with STDP ([`snn`]). Firing rasters become
//! normalized firing histograms ([`features`]) which a kernel SVM
//! classifies ([`classifier`]). [`baselines`] holds the DTW and
//! statistical-feature comparison methods and [`harness`] runs
//! leave-one-subject-out evaluation over truncated observations.

// NaN-rejecting validation reads clearest as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod classifier;
pub mod encoding;
pub mod error;
pub mod features;
pub mod harness;
pub mod pipeline;
pub mod provenance;
pub mod snn;

pub use error::{CttmError, Result};

/// Version tag written into every serialized artifact.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn check_format_version(found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(CttmError::FormatVersion {
            found,
            expected: FORMAT_VERSION,
        });
    }
    Ok(())
}

/// Derive an independent stream seed from a base seed and a path of
/// indices (fold, channel, ...). SplitMix64 finalizer per component.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    for &p in path {
        h = h.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}
