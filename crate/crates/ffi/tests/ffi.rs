use std::ffi::{c_char, CString};
use std::path::Path;
use std::ptr;

use cttm::harness::{gen_synthetic, SyntheticConfig};
use cttm::pipeline::{CttmConfig, CttmModel as Model};
use cttm::provenance::FoldTag;
use cttm_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { cttm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn scalar_functions() {
    assert_eq!(cttm_f1_score(2, 1, 1), 2.0 / 3.0);
    assert_eq!(cttm_format_version(), cttm::FORMAT_VERSION);

    let a = [1u8, 1, 0, 0];
    let b = [1u8, 0, 0, 1];
    let mut k = f64::NAN;
    assert_eq!(unsafe { cttm_cohen_kappa(a.as_ptr(), b.as_ptr(), 4, &mut k) }, CttmStatus::Ok);
    assert_eq!(k, 0.0);

    let bad = [2u8, 0, 0, 0];
    assert_eq!(unsafe { cttm_cohen_kappa(bad.as_ptr(), b.as_ptr(), 4, &mut k) }, CttmStatus::InvalidInput);
    assert!(last_error().contains("label"));

    let x = [0.0, 1.0];
    let y = [0.0, 1.0, 1.0];
    let mut d = -1.0;
    assert_eq!(unsafe { cttm_dtw_distance(x.as_ptr(), 2, y.as_ptr(), 3, 1, &mut d) }, CttmStatus::Ok);
    assert_eq!(d, 0.0);
    assert_eq!(unsafe { cttm_dtw_distance(x.as_ptr(), 0, y.as_ptr(), 3, 1, &mut d) }, CttmStatus::InvalidInput);
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { cttm_cohen_kappa(ptr::null(), ptr::null(), 3, ptr::null_mut()) }, CttmStatus::NullPointer);
    assert!(last_error().starts_with("null pointer"));
    assert_eq!(unsafe { cttm_network_n_neurons(ptr::null()) }, 0);
    unsafe { cttm_network_free(ptr::null_mut()) };
    unsafe { cttm_model_free(ptr::null_mut()) };
}

#[test]
fn error_message_truncates() {
    let mut k = 0.0;
    let a = [0u8];
    unsafe { cttm_cohen_kappa(a.as_ptr(), a.as_ptr(), 0, &mut k) };
    let mut buf = [0x7f as c_char; 4];
    let full = unsafe { cttm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 3);
    assert_eq!(buf[3], 0);
}

#[test]
fn network_simulation_matches_library() {
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { cttm_network_new(5, &mut net) }, CttmStatus::Ok);
    assert_eq!(unsafe { cttm_network_n_neurons(net) }, 250);
    let ms: Vec<u32> = (0..50).collect();
    let neurons: Vec<u32> = (0..50).map(|i| (i * 3) % 200).collect();
    let mut raster = vec![0u8; 250 * 100];
    let st = unsafe { cttm_network_simulate(net, ms.as_ptr(), neurons.as_ptr(), 50, 100, raster.as_mut_ptr()) };
    assert_eq!(st, CttmStatus::Ok);

    let lib_net = cttm::snn::make_network(5, &Default::default()).unwrap();
    let schedule = cttm::snn::StimulusSchedule::new(
        ms.iter().zip(&neurons).map(|(&ms, &neuron)| cttm::snn::Stimulation { ms, neuron }).collect(),
    );
    let map = cttm::snn::simulate_sample(&lib_net, &schedule, 100).unwrap();
    assert_eq!(raster.iter().filter(|&&b| b == 1).count(), map.firing_count());
    for s in map.spikes() {
        assert_eq!(raster[s.neuron as usize * 100 + s.t as usize], 1);
    }

    let bad_neuron = [400u32];
    let st = unsafe { cttm_network_simulate(net, ms.as_ptr(), bad_neuron.as_ptr(), 1, 100, raster.as_mut_ptr()) };
    assert_eq!(st, CttmStatus::InvalidInput);
    unsafe { cttm_network_free(net) };
}

#[test]
fn model_round_trip_through_c_abi() {
    let ds = gen_synthetic(&SyntheticConfig {
        subjects: 2,
        give_events: 20,
        keep_events: 30,
        ..Default::default()
    })
    .unwrap();
    let cfg = CttmConfig {
        presentations: 8,
        ..Default::default()
    };
    let train: Vec<_> = ds.events.iter().collect();
    let model = Model::fit(&train, &cfg, 1, FoldTag::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("model.json");
    model.save(&file).unwrap();

    let c_path = CString::new(file.to_str().unwrap()).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { cttm_model_load(c_path.as_ptr(), &mut handle) }, CttmStatus::Ok);
    assert_eq!(unsafe { cttm_model_input_channels(handle) }, 50);
    for e in ds.events.iter().take(10) {
        let mut label = 9u8;
        let mut decision = f64::NAN;
        let st = unsafe {
            cttm_model_predict(handle, e.samples.as_slice().as_ptr(), e.len(), e.channels(), &mut label, &mut decision)
        };
        assert_eq!(st, CttmStatus::Ok);
        assert_eq!(decision.to_bits(), model.decision_value(e).unwrap().to_bits());
        assert_eq!(label, model.predict(e).unwrap().as_u8());
    }
    let mut label = 0u8;
    let st = unsafe { cttm_model_predict(handle, ds.events[0].samples.as_slice().as_ptr(), 2, 3, &mut label, ptr::null_mut()) };
    assert_eq!(st, CttmStatus::InvalidInput);
    unsafe { cttm_model_free(handle) };

    let missing = CString::new(dir.path().join("none.json").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { cttm_model_load(missing.as_ptr(), &mut handle) }, CttmStatus::Io);
}

#[test]
fn header_is_generated_and_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cttm.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cttm_model_predict", "cttm_network_simulate", "CTTM_STATUS_FOLD_LEAKAGE", "typedef struct CttmModel CttmModel"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
