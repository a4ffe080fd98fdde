//! Datasets, the synthetic generator, leave-one-subject-out evaluation,
//! agreement statistics and raster images.

pub mod dataset;
pub mod eval;
pub mod folds;
pub mod metrics;
pub mod raster;
pub mod synth;

pub use dataset::{Dataset, DatasetProvenance};
pub use eval::{
    default_taus, evaluate, run_eval, CttmMethod, DtwMethod, EvalConfig, EvalReport, FoldPredictor, FoldResult,
    IshiiMethod, Method, MethodReport, RunMeta, TauResult,
};
pub use folds::{loso_folds, Fold};
pub use metrics::{cohen_kappa, f1_score, Confusion};
pub use raster::{raster_ppm, render_raster};
pub use synth::{gen_synthetic, SyntheticConfig};
