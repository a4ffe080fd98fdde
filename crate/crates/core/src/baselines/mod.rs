//! Comparison methods: DTW nearest-template matching and SVM over
//! per-channel movement/amplitude/frequency statistics.

mod dtw;
mod ishii;

pub use dtw::{dtw_distance, knn_dtw_predict, Template, TemplateSet, TEMPLATES_PER_CLASS};
pub use ishii::{amplitude, frequency, ishii_extract, movement, normalize_channel, ChannelStats};
