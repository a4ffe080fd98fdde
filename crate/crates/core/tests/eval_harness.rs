use cttm::encoding::{RawEvent, TurnLabel};
use cttm::harness::{
    evaluate, gen_synthetic, run_eval, Dataset, EvalConfig, FoldPredictor, Method, SyntheticConfig,
};
use cttm::pipeline::{CttmConfig, CttmModel};
use cttm::provenance::FoldTag;
use cttm::{CttmError, Result};

fn small() -> Dataset {
    gen_synthetic(&SyntheticConfig {
        subjects: 3,
        give_events: 24,
        keep_events: 36,
        ..Default::default()
    })
    .unwrap()
}

/// Knows every label in the dataset.
struct Oracle {
    labels: Vec<(u64, TurnLabel)>,
    constant: Option<TurnLabel>,
}

struct OracleModel {
    labels: Vec<(u64, TurnLabel)>,
    constant: Option<TurnLabel>,
    tag: FoldTag,
}

impl FoldPredictor for OracleModel {
    fn tag(&self) -> &FoldTag {
        &self.tag
    }

    fn predict(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>> {
        Ok(events
            .iter()
            .map(|e| {
                self.constant
                    .unwrap_or_else(|| self.labels.iter().find(|l| l.0 == e.event_id).unwrap().1)
            })
            .collect())
    }
}

impl Method for Oracle {
    fn name(&self) -> &str {
        "oracle"
    }

    fn fit(&self, _train: &[&RawEvent], tag: FoldTag, _seed: u64) -> Result<Box<dyn FoldPredictor>> {
        Ok(Box::new(OracleModel {
            labels: self.labels.clone(),
            constant: self.constant,
            tag,
        }))
    }
}

/// Claims to have been fitted on every subject.
struct Leaky;

impl Method for Leaky {
    fn name(&self) -> &str {
        "leaky"
    }

    fn fit(&self, _train: &[&RawEvent], tag: FoldTag, _seed: u64) -> Result<Box<dyn FoldPredictor>> {
        Ok(Box::new(OracleModel {
            labels: Vec::new(),
            constant: Some(TurnLabel::Keep),
            tag: FoldTag::new(tag.fold, vec![0, 1, 2]),
        }))
    }
}

#[test]
fn perfect_and_degenerate_predictors() {
    let ds = small();
    let labels: Vec<(u64, TurnLabel)> = ds.events.iter().map(|e| (e.event_id, e.label)).collect();
    let perfect = Oracle { labels: labels.clone(), constant: None };
    let zero = Oracle { labels, constant: Some(TurnLabel::Keep) };
    let taus = [0.1, 0.5, 1.0];
    let r = run_eval(&ds, &[&perfect, &zero], &taus, 0).unwrap();
    r.check_consistency().unwrap();
    assert!(r.methods[0].taus.iter().all(|t| t.f1 == 1.0));
    assert!(r.methods[1].taus.iter().all(|t| t.f1 == 0.0 && t.recall == 0.0));
    assert_eq!(r.methods[0].taus[0].folds.len(), 3);
    assert_eq!(r.methods[0].taus[0].confusion.total(), 60);
}

#[test]
fn cross_fold_read_aborts() {
    let ds = small();
    let err = run_eval(&ds, &[&Leaky], &[1.0], 0).unwrap_err();
    assert!(matches!(err, CttmError::FoldLeakage(_)), "{err}");
}

#[test]
fn unknown_method_and_bad_taus() {
    let ds = small();
    let cfg = EvalConfig {
        methods: vec!["svm-magic".into()],
        ..Default::default()
    };
    assert!(matches!(evaluate(&ds, &cfg), Err(CttmError::InvalidConfig(_))));
    let labels = ds.events.iter().map(|e| (e.event_id, e.label)).collect();
    let m = Oracle { labels, constant: None };
    assert!(matches!(run_eval(&ds, &[&m], &[0.0], 0), Err(CttmError::InvalidConfig(_))));
    assert!(matches!(run_eval(&ds, &[&m], &[1.5], 0), Err(CttmError::InvalidConfig(_))));
}

#[test]
fn baselines_run_end_to_end() {
    let ds = small();
    let cfg = EvalConfig {
        methods: vec!["dtw".into(), "ishii".into()],
        taus: vec![0.5, 1.0],
        ..Default::default()
    };
    let r = evaluate(&ds, &cfg).unwrap();
    r.check_consistency().unwrap();
    for m in &r.methods {
        assert!(m.f1_at(1.0).unwrap() > 0.5, "{} F1 {}", m.method, m.f1_at(1.0).unwrap());
    }
    let again = evaluate(&ds, &cfg).unwrap();
    assert_eq!(r, again);
}

#[test]
fn report_files() {
    let ds = small();
    let labels = ds.events.iter().map(|e| (e.event_id, e.label)).collect();
    let m = Oracle { labels, constant: None };
    let r = run_eval(&ds, &[&m], &[0.5, 1.0], 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    r.save_json(&dir.path().join("r.json")).unwrap();
    r.save_csv(&dir.path().join("r.csv")).unwrap();
    let back: cttm::harness::EvalReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(back, r);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "method,tau,fold,f1");
    assert_eq!(lines.len(), 1 + 2 * (3 + 1));
    assert!(lines.contains(&"oracle,1,pooled,1"));
}

#[test]
fn model_fit_save_load_and_leakage_guard() {
    let ds = small();
    let cfg = CttmConfig {
        presentations: 8,
        ..Default::default()
    };
    let train: Vec<&RawEvent> = ds.events.iter().filter(|e| e.subject_id != 2).collect();
    let tag = FoldTag::new(Some(2), vec![0, 1]);
    let model = CttmModel::fit(&train, &cfg, 4, tag.clone()).unwrap();
    assert_eq!(model.networks.len(), 10);
    assert_eq!(model.descriptor(&ds.events[0]).unwrap().len(), 500);
    for w in model.networks.iter().flat_map(|n| n.synapses()) {
        assert!(w.weight >= -5.0 && w.weight <= 10.0);
    }

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    model.save(&p).unwrap();
    let back = CttmModel::load(&p).unwrap();
    for e in &ds.events[..8] {
        assert_eq!(back.decision_value(e).unwrap().to_bits(), model.decision_value(e).unwrap().to_bits());
    }

    // fitting on events of a subject outside the declared training set
    let all: Vec<&RawEvent> = ds.events.iter().collect();
    assert!(matches!(CttmModel::fit(&all, &cfg, 4, tag), Err(CttmError::FoldLeakage(_))));

    let mut mixed = model.clone();
    mixed.normalizer.tag = FoldTag::new(Some(1), vec![0, 2]);
    assert!(matches!(mixed.predict(&ds.events[0]), Err(CttmError::FoldLeakage(_))));
}

#[test]
fn truncation_shortens_observations() {
    let ds = small();
    let e = &ds.events[0];
    assert_eq!(e.truncate(1.0).unwrap(), *e);
    assert_eq!(e.truncate(0.01).unwrap().len(), 1);
    assert!(matches!(e.truncate(0.0), Err(CttmError::InvalidInput(_))));
}
