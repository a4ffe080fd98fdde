use std::path::Path;
use std::process::{Command, Output};

fn cttm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cttm")).args(args).current_dir(dir).output().unwrap()
}

#[test]
fn gen_synth_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"subjects":2,"give_events":4,"keep_events":6}"#).unwrap();
    for out in ["d.json", "d.csv"] {
        let o = cttm(&["gen-synth", "--out", out, "--config", "c.json", "--seed", "3"], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = cttm::harness::Dataset::load(&dir.path().join("d.json")).unwrap();
    let b = cttm::harness::Dataset::load(&dir.path().join("d.csv")).unwrap();
    assert_eq!(a.events, b.events);
    assert_eq!(a.label_counts(), (4, 6));
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(csv.starts_with("# format_version=1\nevent_id,subject_id,label,t,ch0,"));
}

#[test]
fn kappa_command() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), "1 1 0 0\n").unwrap();
    std::fs::write(dir.path().join("b.txt"), "1,0,0,1").unwrap();
    let o = cttm(&["kappa", "a.txt", "b.txt"], dir.path());
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0");

    std::fs::write(dir.path().join("c.txt"), "1 0").unwrap();
    assert_eq!(cttm(&["kappa", "a.txt", "c.txt"], dir.path()).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing input file: I/O
    assert_eq!(cttm(&["eval", "--data", "nope.json", "--out", "r"], dir.path()).status.code(), Some(1));
    // unknown method: validation
    std::fs::write(dir.path().join("c.json"), r#"{"subjects":2,"give_events":4,"keep_events":6}"#).unwrap();
    cttm(&["gen-synth", "--out", "d.json", "--config", "c.json"], dir.path());
    let o = cttm(&["eval", "--data", "d.json", "--out", "r", "--method", "magic"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown method"));
    // tau out of range: validation
    let o = cttm(&["eval", "--data", "d.json", "--out", "r", "--method", "ishii", "--tau-grid", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    // bad config: validation
    std::fs::write(dir.path().join("bad.json"), r#"{"noise_std": -1}"#).unwrap();
    assert_eq!(cttm(&["gen-synth", "--out", "x.json", "--config", "bad.json"], dir.path()).status.code(), Some(2));
    // usage error
    assert_eq!(cttm(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn eval_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"subjects":3,"give_events":15,"keep_events":21}"#).unwrap();
    cttm(&["gen-synth", "--out", "d.json", "--config", "c.json"], dir.path());
    let o = cttm(&["eval", "--data", "d.json", "--out", "rep", "--method", "ishii", "--tau-grid", "0.5,1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ishii F1 0.5:"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep/report.json")).unwrap()).unwrap();
    assert_eq!(report["format_version"], 1);
    assert_eq!(report["run"]["n_folds"], 3);
    assert!(dir.path().join("rep/report.csv").exists());
}
