//! Leave-one-subject-out evaluation over truncated observations.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, DatasetProvenance};
use super::folds::{loso_folds, Fold};
use super::metrics::Confusion;
use crate::baselines::{ishii_extract, ChannelStats, Template, TemplateSet, TEMPLATES_PER_CLASS};
use crate::classifier::{self, GridConfig, TrainedClassifier};
use crate::encoding::{EncoderConfig, FeatureEncoder, RawEvent, TurnLabel};
use crate::pipeline::{CttmConfig, CttmModel};
use crate::provenance::FoldTag;
use crate::{derive_seed, CttmError, Result, FORMAT_VERSION};

/// A model fitted on one fold's training subjects.
pub trait FoldPredictor: Send + Sync {
    fn tag(&self) -> &FoldTag;
    fn predict(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>>;
}

/// A trainable method under evaluation.
pub trait Method: Sync {
    fn name(&self) -> &str;
    fn fit(&self, train: &[&RawEvent], tag: FoldTag, seed: u64) -> Result<Box<dyn FoldPredictor>>;
}

pub struct CttmMethod {
    pub config: CttmConfig,
}

impl FoldPredictor for CttmModel {
    fn tag(&self) -> &FoldTag {
        &self.tag
    }

    fn predict(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>> {
        self.predict_batch(events)
    }
}

impl Method for CttmMethod {
    fn name(&self) -> &str {
        "cttm"
    }

    fn fit(&self, train: &[&RawEvent], tag: FoldTag, seed: u64) -> Result<Box<dyn FoldPredictor>> {
        Ok(Box::new(CttmModel::fit(train, &self.config, seed, tag)?))
    }
}

/// 1-NN DTW over the selected feature columns.
pub struct DtwMethod {
    pub encoder: EncoderConfig,
    pub templates_per_class: usize,
}

struct DtwModel {
    encoder: FeatureEncoder,
    templates: TemplateSet,
}

impl FoldPredictor for DtwModel {
    fn tag(&self) -> &FoldTag {
        &self.templates.tag
    }

    fn predict(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>> {
        events
            .par_iter()
            .map(|e| self.templates.predict(&self.encoder.selected_columns(e)?))
            .collect()
    }
}

impl Method for DtwMethod {
    fn name(&self) -> &str {
        "dtw"
    }

    fn fit(&self, train: &[&RawEvent], tag: FoldTag, seed: u64) -> Result<Box<dyn FoldPredictor>> {
        let encoder = FeatureEncoder::fit(train, &self.encoder, tag.clone())?;
        let pool = train
            .iter()
            .map(|e| {
                Ok(Template {
                    event_id: e.event_id,
                    label: e.label,
                    series: encoder.selected_columns(e)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let templates = TemplateSet::select(&pool, self.templates_per_class, seed, tag)?;
        Ok(Box::new(DtwModel { encoder, templates }))
    }
}

/// SVM over per-channel movement, amplitude and frequency.
pub struct IshiiMethod {
    pub grid: GridConfig,
}

struct IshiiModel {
    stats: ChannelStats,
    classifier: TrainedClassifier,
}

impl FoldPredictor for IshiiModel {
    fn tag(&self) -> &FoldTag {
        &self.stats.tag
    }

    fn predict(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>> {
        events
            .par_iter()
            .map(|e| self.classifier.predict(&ishii_extract(&e.samples, &self.stats)?))
            .collect()
    }
}

impl Method for IshiiMethod {
    fn name(&self) -> &str {
        "ishii"
    }

    fn fit(&self, train: &[&RawEvent], tag: FoldTag, seed: u64) -> Result<Box<dyn FoldPredictor>> {
        let stats = ChannelStats::fit(train.iter().map(|e| &e.samples), tag.clone())?;
        let x = train
            .iter()
            .map(|e| ishii_extract(&e.samples, &stats))
            .collect::<Result<Vec<_>>>()?;
        let y: Vec<TurnLabel> = train.iter().map(|e| e.label).collect();
        let classifier = classifier::fit(&x, &y, &self.grid, seed, tag)?;
        Ok(Box::new(IshiiModel { stats, classifier }))
    }
}

/// Observation fractions 0.1, 0.2, ..., 1.0.
pub fn default_taus() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub methods: Vec<String>,
    pub taus: Vec<f64>,
    pub seed: u64,
    pub cttm: CttmConfig,
    pub templates_per_class: usize,
    pub ishii_grid: GridConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            methods: vec!["cttm".into(), "dtw".into(), "ishii".into()],
            taus: default_taus(),
            seed: 0,
            cttm: CttmConfig::default(),
            templates_per_class: TEMPLATES_PER_CLASS,
            ishii_grid: GridConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn build_methods(&self) -> Result<Vec<Box<dyn Method>>> {
        self.methods
            .iter()
            .map(|m| -> Result<Box<dyn Method>> {
                match m.as_str() {
                    "cttm" => Ok(Box::new(CttmMethod {
                        config: self.cttm.clone(),
                    })),
                    "dtw" => Ok(Box::new(DtwMethod {
                        encoder: self.cttm.encoder.clone(),
                        templates_per_class: self.templates_per_class,
                    })),
                    "ishii" => Ok(Box::new(IshiiMethod {
                        grid: self.ishii_grid.clone(),
                    })),
                    other => Err(CttmError::InvalidConfig(format!(
                        "unknown method '{other}' (expected cttm, dtw or ishii)"
                    ))),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_subject: u32,
    pub confusion: Confusion,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauResult {
    pub tau: f64,
    /// Pooled over all folds.
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub folds: Vec<FoldResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub taus: Vec<TauResult>,
}

impl MethodReport {
    pub fn f1_at(&self, tau: f64) -> Option<f64> {
        self.taus.iter().find(|t| (t.tau - tau).abs() < 1e-9).map(|t| t.f1)
    }
}

/// Deterministic description of the run (no timing or host details).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub crate_version: String,
    pub seed: u64,
    pub n_events: usize,
    pub n_subjects: usize,
    pub n_folds: usize,
    pub taus: Vec<f64>,
    pub dataset: DatasetProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub methods: Vec<MethodReport>,
    pub run: RunMeta,
}

impl EvalReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Every stored F1 matches its confusion counts and pooled counts equal
    /// the fold sums.
    pub fn check_consistency(&self) -> Result<()> {
        for m in &self.methods {
            for t in &m.taus {
                let mut sum = Confusion::default();
                for f in &t.folds {
                    if (f.confusion.f1() - f.f1).abs() > 1e-12 {
                        return Err(CttmError::InvalidInput(format!("{} fold {} F1 mismatch", m.method, f.fold)));
                    }
                    sum.merge(&f.confusion);
                }
                if sum != t.confusion || (t.confusion.f1() - t.f1).abs() > 1e-12 {
                    return Err(CttmError::InvalidInput(format!("{} tau {} pooled mismatch", m.method, t.tau)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Flat `method,tau,fold,f1` rows; pooled scores use fold `pooled`.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["method", "tau", "fold", "f1"])?;
        for m in &self.methods {
            for t in &m.taus {
                for f in &t.folds {
                    w.write_record([m.method.clone(), t.tau.to_string(), f.fold.to_string(), f.f1.to_string()])?;
                }
                w.write_record([m.method.clone(), t.tau.to_string(), "pooled".into(), t.f1.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(CttmError::InvalidConfig("empty tau grid".into()));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(CttmError::InvalidConfig(format!("tau must lie in (0, 1], got {t}")));
    }
    Ok(())
}

/// Per-fold confusion for each method and tau: `[method][tau]`.
fn eval_fold(ds: &Dataset, fold: &Fold, methods: &[&dyn Method], taus: &[f64], seed: u64) -> Result<Vec<Vec<Confusion>>> {
    let train = fold.train(ds);
    let test = fold.test(ds);
    let tag = fold.tag();
    let mut out = Vec::with_capacity(methods.len());
    for m in methods {
        let model = m.fit(&train, tag.clone(), derive_seed(seed, &[fold.index as u64]))?;
        for e in &test {
            model.tag().check_test_read(Some(fold.index), e.subject_id)?;
        }
        let mut per_tau = Vec::with_capacity(taus.len());
        for &tau in taus {
            let truncated = test.iter().map(|e| e.truncate(tau)).collect::<Result<Vec<_>>>()?;
            let pred = model.predict(&truncated)?;
            let truth: Vec<TurnLabel> = test.iter().map(|e| e.label).collect();
            per_tau.push(Confusion::from_labels(&truth, &pred));
        }
        log::info!(
            "fold {} (subject {}) {}: F1 at tau=1 {:.3}",
            fold.index,
            fold.test_subject,
            m.name(),
            per_tau.last().map_or(0.0, Confusion::f1)
        );
        out.push(per_tau);
    }
    Ok(out)
}

/// Fit each method on every loso training split and score the held-out
/// subject at every tau. Folds run in parallel; results are merged in fold
/// order and F1 is computed from counts pooled over folds.
pub fn run_eval(ds: &Dataset, methods: &[&dyn Method], taus: &[f64], seed: u64) -> Result<EvalReport> {
    ds.validate()?;
    check_taus(taus)?;
    if methods.is_empty() {
        return Err(CttmError::InvalidConfig("no methods to evaluate".into()));
    }
    let folds = loso_folds(ds)?;
    let per_fold = folds
        .par_iter()
        .map(|f| eval_fold(ds, f, methods, taus, seed))
        .collect::<Result<Vec<_>>>()?;

    let reports = methods
        .iter()
        .enumerate()
        .map(|(mi, m)| MethodReport {
            method: m.name().to_string(),
            taus: taus
                .iter()
                .enumerate()
                .map(|(ti, &tau)| {
                    let folds_out: Vec<FoldResult> = folds
                        .iter()
                        .zip(&per_fold)
                        .map(|(f, r)| FoldResult {
                            fold: f.index,
                            test_subject: f.test_subject,
                            confusion: r[mi][ti],
                            f1: r[mi][ti].f1(),
                        })
                        .collect();
                    let mut pooled = Confusion::default();
                    folds_out.iter().for_each(|f| pooled.merge(&f.confusion));
                    TauResult {
                        tau,
                        confusion: pooled,
                        precision: pooled.precision(),
                        recall: pooled.recall(),
                        f1: pooled.f1(),
                        folds: folds_out,
                    }
                })
                .collect(),
        })
        .collect();

    Ok(EvalReport {
        format_version: FORMAT_VERSION,
        methods: reports,
        run: RunMeta {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            n_events: ds.events.len(),
            n_subjects: ds.subjects().len(),
            n_folds: folds.len(),
            taus: taus.to_vec(),
            dataset: ds.provenance.clone(),
        },
    })
}

/// Evaluate the methods named in `config`.
pub fn evaluate(ds: &Dataset, config: &EvalConfig) -> Result<EvalReport> {
    let methods = config.build_methods()?;
    let refs: Vec<&dyn Method> = methods.iter().map(|m| m.as_ref()).collect();
    run_eval(ds, &refs, &config.taus, config.seed)
}
