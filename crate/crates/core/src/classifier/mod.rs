//! Soft-margin kernel SVM with class-balanced penalties and
//! cross-validated grid search.

mod smo;

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::TurnLabel;
use crate::harness::metrics::Confusion;
use crate::provenance::FoldTag;
use crate::{check_format_version, CttmError, Result, FORMAT_VERSION};
use smo::{solve, DenseGram, SubsetGram};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => Err(
                CttmError::InvalidConfig(format!("rbf gamma must be positive, got {gamma}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    /// Sort key for tie-breaking: linear counts as gamma 0.
    fn gamma_key(&self) -> f64 {
        match *self {
            KernelSpec::Linear => 0.0,
            KernelSpec::Rbf { gamma } => gamma,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A radial-basis width candidate; `InverseDim` resolves to `1 / d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaChoice {
    InverseDim,
    Fixed(f64),
}

impl GammaChoice {
    pub fn resolve(self, dim: usize) -> f64 {
        match self {
            GammaChoice::InverseDim => 1.0 / dim.max(1) as f64,
            GammaChoice::Fixed(g) => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub c_values: Vec<f64>,
    pub gammas: Vec<GammaChoice>,
    pub include_linear: bool,
    pub include_rbf: bool,
    pub folds: usize,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            c_values: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            gammas: vec![
                GammaChoice::InverseDim,
                GammaChoice::Fixed(0.01),
                GammaChoice::Fixed(0.1),
                GammaChoice::Fixed(1.0),
            ],
            include_linear: true,
            include_rbf: true,
            folds: 5,
            tolerance: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl GridConfig {
    /// Candidate points for `dim`-dimensional data: linear first, then
    /// radial-basis, each by ascending C.
    pub fn points(&self, dim: usize) -> Vec<SvmParams> {
        let mut pts = Vec::new();
        if self.include_linear {
            pts.extend(self.c_values.iter().map(|&c| SvmParams {
                kernel: KernelSpec::Linear,
                c,
            }));
        }
        if self.include_rbf {
            for &c in &self.c_values {
                for g in &self.gammas {
                    pts.push(SvmParams {
                        kernel: KernelSpec::Rbf { gamma: g.resolve(dim) },
                        c,
                    });
                }
            }
        }
        pts
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let pts = self.points(dim);
        if pts.is_empty() {
            return Err(CttmError::InvalidConfig("empty hyperparameter grid".into()));
        }
        for p in &pts {
            p.validate()?;
        }
        if self.folds < 2 {
            return Err(CttmError::InvalidConfig("grid search needs at least 2 folds".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(CttmError::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    /// Penalty; sample `i` gets the box bound `C / (2 n_{y_i})`.
    pub c: f64,
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(CttmError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }
}

/// Cross-validation score of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub params: SvmParams,
    pub f1: f64,
}

/// What the grid search saw, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    pub scores: Vec<GridScore>,
    pub selected: usize,
    /// Inner fold of every training sample.
    pub fold_of: Vec<usize>,
    pub labels: Vec<TurnLabel>,
    /// Held-out predictions of the selected point.
    pub predictions: Vec<TurnLabel>,
}

impl CvRecord {
    /// F1 of the selected point recomputed from the stored predictions.
    pub fn recomputed_f1(&self) -> f64 {
        Confusion::from_labels(&self.labels, &self.predictions).f1()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub tag: FoldTag,
    pub seed: u64,
    pub n_train: usize,
    pub iterations: usize,
    pub cv: Option<CvRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub params: SvmParams,
    pub dim: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i y_i` of each support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
    /// Primal weights, present for the linear kernel.
    pub linear_weights: Option<Vec<f64>>,
    pub meta: TrainingMeta,
}

fn signed(labels: &[TurnLabel]) -> Vec<f64> {
    labels.iter().map(|l| if l.is_give() { 1.0 } else { -1.0 }).collect()
}

/// Per-sample box bounds `C / (2 n_class)`: each class carries half the
/// total penalty, and duplicating the data leaves the problem unchanged.
fn upper_bounds(y: &[f64], c: f64) -> Vec<f64> {
    let n_pos = y.iter().filter(|v| **v > 0.0).count() as f64;
    let n_neg = y.len() as f64 - n_pos;
    y.iter()
        .map(|v| if *v > 0.0 { c / (2.0 * n_pos) } else { c / (2.0 * n_neg) })
        .collect()
}

fn check_data(x: &[Vec<f64>], y: &[TurnLabel]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(CttmError::InvalidInput(format!("{} samples but {} labels", x.len(), y.len())));
    }
    let dim = x.first().map_or(0, Vec::len);
    if dim == 0 || x.iter().any(|r| r.len() != dim) {
        return Err(CttmError::InvalidInput("samples must be non-empty vectors of equal length".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CttmError::NumericDomain("non-finite training value".into()));
    }
    let pos = y.iter().filter(|l| l.is_give()).count();
    if pos == 0 || pos == y.len() {
        return Err(CttmError::InvalidInput("training labels contain a single class".into()));
    }
    Ok(dim)
}

/// Pairwise dot products and squared distances of the training set.
struct GramCache {
    n: usize,
    dots: Vec<f64>,
    sq_dist: Vec<f64>,
}

impl GramCache {
    fn new(x: &[Vec<f64>]) -> Self {
        let n = x.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if j < i { 0.0 } else { dot(&x[i], &x[j]) }).collect())
            .collect();
        let mut dots = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                dots[i * n + j] = rows[i][j];
                dots[j * n + i] = rows[i][j];
            }
        }
        let mut sq_dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sq_dist[i * n + j] = (dots[i * n + i] + dots[j * n + j] - 2.0 * dots[i * n + j]).max(0.0);
            }
        }
        GramCache { n, dots, sq_dist }
    }

    fn kernel(&self, k: &KernelSpec) -> Vec<f64> {
        match *k {
            KernelSpec::Linear => self.dots.clone(),
            KernelSpec::Rbf { gamma } => self.sq_dist.iter().map(|d| (-gamma * d).exp()).collect(),
        }
    }
}

/// Stratified inner-fold assignment: each class is shuffled and dealt
/// round-robin over the folds.
fn assign_folds(y: &[TurnLabel], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; y.len()];
    for class in [TurnLabel::Keep, TurnLabel::Give] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for (p, i) in idx.into_iter().enumerate() {
            fold_of[i] = p % folds;
        }
    }
    fold_of
}

/// Held-out predictions of one grid point.
fn cross_validate(k: &[f64], n: usize, y: &[f64], fold_of: &[usize], folds: usize, params: &SvmParams, grid: &GridConfig) -> Vec<TurnLabel> {
    let mut pred = vec![TurnLabel::Keep; n];
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != f).collect();
        let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == f).collect();
        if test.is_empty() {
            continue;
        }
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let has_both = yt.iter().any(|v| *v > 0.0) && yt.iter().any(|v| *v < 0.0);
        if !has_both {
            let only = if yt[0] > 0.0 { TurnLabel::Give } else { TurnLabel::Keep };
            for &i in &test {
                pred[i] = only;
            }
            continue;
        }
        let ub = upper_bounds(&yt, params.c);
        let sol = solve(&SubsetGram { k, stride: n, idx: &train }, &yt, &ub, grid.tolerance, grid.max_iter);
        for &i in &test {
            let mut dv = -sol.rho;
            for (a, (&j, yj)) in sol.alpha.iter().zip(train.iter().zip(&yt)) {
                if *a != 0.0 {
                    dv += a * yj * k[j * n + i];
                }
            }
            pred[i] = if dv > 0.0 { TurnLabel::Give } else { TurnLabel::Keep };
        }
    }
    pred
}

fn build_model(x: &[Vec<f64>], y: &[f64], alpha: &[f64], rho: f64, params: SvmParams, dim: usize, meta: TrainingMeta) -> TrainedClassifier {
    let mut support_vectors = Vec::new();
    let mut coef = Vec::new();
    for i in 0..x.len() {
        if alpha[i] != 0.0 {
            support_vectors.push(x[i].clone());
            coef.push(alpha[i] * y[i]);
        }
    }
    let linear_weights = matches!(params.kernel, KernelSpec::Linear).then(|| {
        let mut w = vec![0.0; dim];
        for (sv, c) in support_vectors.iter().zip(&coef) {
            for (wk, s) in w.iter_mut().zip(sv) {
                *wk += c * s;
            }
        }
        w
    });
    TrainedClassifier {
        params,
        dim,
        support_vectors,
        coef,
        rho,
        linear_weights,
        meta,
    }
}

/// Train with fixed hyperparameters.
pub fn fit_params(
    x: &[Vec<f64>],
    labels: &[TurnLabel],
    params: SvmParams,
    tolerance: f64,
    max_iter: usize,
    tag: FoldTag,
) -> Result<TrainedClassifier> {
    check_data(x, labels)?;
    params.validate()?;
    let cache = GramCache::new(x);
    fit_with_cache(x, labels, &cache, params, tolerance, max_iter, tag, 0, None)
}

#[allow(clippy::too_many_arguments)]
fn fit_with_cache(
    x: &[Vec<f64>],
    labels: &[TurnLabel],
    cache: &GramCache,
    params: SvmParams,
    tolerance: f64,
    max_iter: usize,
    tag: FoldTag,
    seed: u64,
    cv: Option<CvRecord>,
) -> Result<TrainedClassifier> {
    let dim = x[0].len();
    let y = signed(labels);
    let k = cache.kernel(&params.kernel);
    let ub = upper_bounds(&y, params.c);
    let sol = solve(&DenseGram { k: &k, n: cache.n }, &y, &ub, tolerance, max_iter);
    let meta = TrainingMeta {
        tag,
        seed,
        n_train: x.len(),
        iterations: sol.iterations,
        cv,
    };
    Ok(build_model(x, &y, &sol.alpha, sol.rho, params, dim, meta))
}

/// Grid search with stratified `grid.folds`-fold cross-validation scored by
/// F1 of the give class, then refit on all data with the best point.
/// Ties go to the smallest C, then the smallest gamma (linear first).
pub fn fit(
    x: &[Vec<f64>],
    labels: &[TurnLabel],
    grid: &GridConfig,
    seed: u64,
    tag: FoldTag,
) -> Result<TrainedClassifier> {
    let dim = check_data(x, labels)?;
    grid.validate(dim)?;
    let points = grid.points(dim);
    let n = x.len();
    let y = signed(labels);
    let cache = GramCache::new(x);
    let fold_of = assign_folds(labels, grid.folds, seed);

    let results: Vec<(f64, Vec<TurnLabel>)> = points
        .par_iter()
        .map(|p| {
            let k = cache.kernel(&p.kernel);
            let pred = cross_validate(&k, n, &y, &fold_of, grid.folds, p, grid);
            (Confusion::from_labels(labels, &pred).f1(), pred)
        })
        .collect();

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        results[b]
            .0
            .total_cmp(&results[a].0)
            .then(points[a].c.total_cmp(&points[b].c))
            .then(points[a].kernel.gamma_key().total_cmp(&points[b].kernel.gamma_key()))
    });
    let best = order[0];
    log::debug!("grid search picked {:?} with cv F1 {:.4}", points[best], results[best].0);

    let cv = CvRecord {
        scores: points
            .iter()
            .zip(&results)
            .map(|(p, r)| GridScore { params: *p, f1: r.0 })
            .collect(),
        selected: best,
        fold_of,
        labels: labels.to_vec(),
        predictions: results[best].1.clone(),
    };
    fit_with_cache(x, labels, &cache, points[best], grid.tolerance, grid.max_iter, tag, seed, Some(cv))
}

impl TrainedClassifier {
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(CttmError::InvalidInput(format!(
                "vector of dimension {} for a model of dimension {}",
                x.len(),
                self.dim
            )));
        }
        let s = match &self.linear_weights {
            Some(w) => dot(w, x),
            None => self
                .support_vectors
                .iter()
                .zip(&self.coef)
                .map(|(sv, c)| c * self.params.kernel.eval(sv, x))
                .sum(),
        };
        Ok(s - self.rho)
    }

    /// Give iff the decision value is strictly positive.
    pub fn predict(&self, x: &[f64]) -> Result<TurnLabel> {
        Ok(if self.decision_value(x)? > 0.0 {
            TurnLabel::Give
        } else {
            TurnLabel::Keep
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ClassifierFile {
            format_version: FORMAT_VERSION,
            model: self.clone(),
        };
        std::fs::write(path, serde_json::to_string(&file)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedClassifier> {
        let file: ClassifierFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        check_format_version(file.format_version)?;
        Ok(file.model)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassifierFile {
    format_version: u32,
    model: TrainedClassifier,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn toy() -> (Vec<Vec<f64>>, Vec<TurnLabel>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..10 {
            x.push(vec![-1.0]);
            y.push(TurnLabel::Keep);
            x.push(vec![1.0]);
            y.push(TurnLabel::Give);
        }
        (x, y)
    }

    fn accuracy(m: &TrainedClassifier, x: &[Vec<f64>], y: &[TurnLabel]) -> f64 {
        x.iter().zip(y).filter(|(v, l)| m.predict(v).unwrap() == **l).count() as f64 / x.len() as f64
    }

    #[test]
    fn separable_toy() {
        let (x, y) = toy();
        let m = fit(&x, &y, &GridConfig::default(), 1, FoldTag::default()).unwrap();
        assert_eq!(accuracy(&m, &x, &y), 1.0);
        assert_eq!(m.predict(&[1.0]).unwrap(), TurnLabel::Give);
        let cv = m.meta.cv.as_ref().unwrap();
        assert_eq!(cv.recomputed_f1(), cv.scores[cv.selected].f1);
    }

    #[test]
    fn grid_ties_prefer_small_c_and_linear() {
        let (x, y) = toy();
        let m = fit(&x, &y, &GridConfig::default(), 1, FoldTag::default()).unwrap();
        assert_eq!(m.params, SvmParams { kernel: KernelSpec::Linear, c: 0.01 });
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![TurnLabel::Give; 2];
        assert!(matches!(
            fit(&x, &y, &GridConfig::default(), 0, FoldTag::default()),
            Err(CttmError::InvalidInput(_))
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let (x, y) = toy();
        let m = fit(&x, &y, &GridConfig::default(), 1, FoldTag::default()).unwrap();
        assert!(m.decision_value(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn xor_with_rbf() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..200 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            x.push(vec![a, b]);
            y.push(if a * b > 0.0 { TurnLabel::Give } else { TurnLabel::Keep });
        }
        let m = fit(&x, &y, &GridConfig::default(), 3, FoldTag::default()).unwrap();
        assert!(matches!(m.params.kernel, KernelSpec::Rbf { .. }));
        assert!(accuracy(&m, &x, &y) > 0.9, "{}", accuracy(&m, &x, &y));
    }

    #[test]
    fn swapping_labels_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![rng.gen_range(-1.0..1.0) + if i % 2 == 0 { 2.0 } else { -2.0 }, rng.gen()]).collect();
        let y: Vec<TurnLabel> = (0..40).map(|i| if i % 2 == 0 { TurnLabel::Give } else { TurnLabel::Keep }).collect();
        let swapped: Vec<TurnLabel> = y.iter().map(|l| if l.is_give() { TurnLabel::Keep } else { TurnLabel::Give }).collect();
        let p = SvmParams { kernel: KernelSpec::Rbf { gamma: 0.5 }, c: 10.0 };
        let a = fit_params(&x, &y, p, 1e-9, 1_000_000, FoldTag::default()).unwrap();
        let b = fit_params(&x, &swapped, p, 1e-9, 1_000_000, FoldTag::default()).unwrap();
        for v in &x {
            let (da, db) = (a.decision_value(v).unwrap(), b.decision_value(v).unwrap());
            assert!(da * db < 0.0);
            assert!((da + db).abs() < 1e-6);
        }
    }

    #[test]
    fn duplication_leaves_boundary_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        let y: Vec<TurnLabel> = x.iter().map(|v| if v[0] + 0.5 * v[1] + rng.gen_range(-0.8..0.8) > 0.0 { TurnLabel::Give } else { TurnLabel::Keep }).collect();
        let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let y2: Vec<TurnLabel> = y.iter().chain(&y).cloned().collect();
        for kernel in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.5 }] {
            let p = SvmParams { kernel, c: 10.0 };
            let a = fit_params(&x, &y, p, 1e-10, 10_000_000, FoldTag::default()).unwrap();
            let b = fit_params(&x2, &y2, p, 1e-10, 10_000_000, FoldTag::default()).unwrap();
            for _ in 0..100 {
                let v = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
                let (da, db) = (a.decision_value(&v).unwrap(), b.decision_value(&v).unwrap());
                assert!((da - db).abs() < 1e-6, "{kernel:?}: {da} vs {db}");
            }
        }
    }

    #[test]
    fn save_load_reproduces_predictions() {
        let (x, y) = toy();
        let m = fit(&x, &y, &GridConfig::default(), 1, FoldTag::new(Some(3), vec![1, 2])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("svm.json");
        m.save(&path).unwrap();
        let back = TrainedClassifier::load(&path).unwrap();
        assert_eq!(back, m);
        for v in [-0.3, 0.0, 0.7] {
            assert_eq!(back.decision_value(&[v]).unwrap().to_bits(), m.decision_value(&[v]).unwrap().to_bits());
        }
    }
}
