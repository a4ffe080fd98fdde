//! C ABI over the `cttm` crate.
//!
//! Every fallible function returns a [`CttmStatus`]; on failure the
//! message is kept per thread and can be copied out with
//! [`cttm_last_error_message`]. Handles are opaque and must be released
//! with their `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cttm::baselines::dtw_distance;
use cttm::encoding::{Matrix, RawEvent, TurnLabel};
use cttm::harness::{cohen_kappa, f1_score};
use cttm::pipeline::CttmModel as Model;
use cttm::snn::{make_network, simulate_sample, Network, NetworkConfig, Stimulation, StimulusSchedule};
use cttm::CttmError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CttmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    NumericDomain = 4,
    FoldLeakage = 5,
    FormatVersion = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
}

impl From<&CttmError> for CttmStatus {
    fn from(e: &CttmError) -> Self {
        match e {
            CttmError::InvalidInput(_)
            | CttmError::InvalidSchedule(_)
            | CttmError::InvalidFeature(_)
            | CttmError::InvalidLevel { .. } => CttmStatus::InvalidInput,
            CttmError::InvalidConfig(_) => CttmStatus::InvalidConfig,
            CttmError::NumericDomain(_) => CttmStatus::NumericDomain,
            CttmError::FoldLeakage(_) => CttmStatus::FoldLeakage,
            CttmError::FormatVersion { .. } => CttmStatus::FormatVersion,
            CttmError::Io(_) => CttmStatus::Io,
            CttmError::Json(_) | CttmError::Csv(_) => CttmStatus::Parse,
        }
    }
}

/// Spiking network with its trained weights.
pub struct CttmNetwork {
    inner: Network,
}

/// Fitted turn-taking model.
pub struct CttmModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Lib(CttmError),
}

impl From<CttmError> for Failure {
    fn from(e: CttmError) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CttmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CttmStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CttmStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            CttmStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CttmStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: caller guarantees `ptr` points at `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

unsafe fn out<'a, T>(ptr: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller guarantees a valid, writable, aligned pointer or null.
    unsafe { ptr.as_mut() }.ok_or(Failure::Null(what))
}

unsafe fn path<'a>(ptr: *const c_char) -> Result<&'a Path, Failure> {
    if ptr.is_null() {
        return Err(Failure::Null("path"));
    }
    // SAFETY: caller passes a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| CttmError::InvalidInput("path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

fn matrix(data: &[f64], rows: usize, cols: usize) -> Result<Matrix, Failure> {
    if rows.checked_mul(cols) != Some(data.len()) {
        return Err(CttmError::InvalidInput("matrix shape does not match buffer".into()).into());
    }
    Ok(Matrix::from_vec(rows, cols, data.to_vec())?)
}

fn labels(data: &[u8]) -> Result<Vec<TurnLabel>, Failure> {
    Ok(data.iter().map(|&v| TurnLabel::try_from(v)).collect::<Result<Vec<_>, _>>()?)
}

/// Version of every file format this library reads and writes.
#[no_mangle]
pub extern "C" fn cttm_format_version() -> u32 {
    cttm::FORMAT_VERSION
}

/// Copy the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes). Returns the full message
/// length excluding the terminator.
///
/// # Safety
/// `buf` must be null or point at `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cttm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: `buf` has room for `len` bytes and `n < len`.
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// F1 of the positive class; 0 when precision and recall are both zero.
#[no_mangle]
pub extern "C" fn cttm_f1_score(true_pos: u64, false_pos: u64, false_neg: u64) -> f64 {
    f1_score(true_pos, false_pos, false_neg)
}

/// Cohen's kappa of two 0/1 label arrays of length `n`.
///
/// # Safety
/// `a` and `b` must point at `n` bytes; `kappa` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cttm_cohen_kappa(a: *const u8, b: *const u8, n: usize, kappa: *mut f64) -> CttmStatus {
    guard(|| {
        let (a, b) = unsafe { (slice(a, n, "a")?, slice(b, n, "b")?) };
        let k = cohen_kappa(&labels(a)?, &labels(b)?)?;
        *unsafe { out(kappa, "kappa")? } = k;
        Ok(())
    })
}

/// DTW distance with L1 local cost between row-major `la x m` and
/// `lb x m` sequences.
///
/// # Safety
/// `a` and `b` must point at `la * m` and `lb * m` doubles; `dist` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cttm_dtw_distance(
    a: *const f64,
    la: usize,
    b: *const f64,
    lb: usize,
    m: usize,
    dist: *mut f64,
) -> CttmStatus {
    guard(|| {
        let na = la.checked_mul(m).ok_or(CttmError::InvalidInput("size overflow".into()))?;
        let nb = lb.checked_mul(m).ok_or(CttmError::InvalidInput("size overflow".into()))?;
        let (sa, sb) = unsafe { (slice(a, na, "a")?, slice(b, nb, "b")?) };
        let d = dtw_distance(&matrix(sa, la, m)?, &matrix(sb, lb, m)?)?;
        *unsafe { out(dist, "dist")? } = d;
        Ok(())
    })
}

/// Build the default 250-neuron network for `seed`.
///
/// # Safety
/// `net` must be writable; the handle stored there is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn cttm_network_new(seed: u64, net: *mut *mut CttmNetwork) -> CttmStatus {
    guard(|| {
        let slot = unsafe { out(net, "net")? };
        let inner = make_network(seed, &NetworkConfig::default())?;
        *slot = Box::into_raw(Box::new(CttmNetwork { inner }));
        Ok(())
    })
}

/// Load a network from a weights file.
///
/// # Safety
/// `file` must be a NUL-terminated path; `net` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cttm_network_load(file: *const c_char, net: *mut *mut CttmNetwork) -> CttmStatus {
    guard(|| {
        let p = unsafe { path(file)? };
        let slot = unsafe { out(net, "net")? };
        let inner = Network::load(p)?;
        *slot = Box::into_raw(Box::new(CttmNetwork { inner }));
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cttm_network_free(net: *mut CttmNetwork) {
    if !net.is_null() {
        // SAFETY: handle was created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(net) });
    }
}

/// Number of neurons, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cttm_network_n_neurons(net: *const CttmNetwork) -> usize {
    unsafe { net.as_ref() }.map_or(0, |n| n.inner.n_neurons())
}

/// Simulate `t_total` ms with the 20 mA stimulation pairs
/// `(stim_ms[i], stim_neuron[i])`. `raster` receives `n_neurons * t_total`
/// bytes, row-major by neuron: 1 where the neuron fired.
///
/// # Safety
/// Arrays must hold `n_stim` elements; `raster` must hold
/// `n_neurons * t_total` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cttm_network_simulate(
    net: *const CttmNetwork,
    stim_ms: *const u32,
    stim_neuron: *const u32,
    n_stim: usize,
    t_total: u32,
    raster: *mut u8,
) -> CttmStatus {
    guard(|| {
        let net = &unsafe { net.as_ref() }.ok_or(Failure::Null("net"))?.inner;
        let (ms, neurons) = unsafe { (slice(stim_ms, n_stim, "stim_ms")?, slice(stim_neuron, n_stim, "stim_neuron")?) };
        let schedule = StimulusSchedule::new(
            ms.iter()
                .zip(neurons)
                .map(|(&ms, &neuron)| Stimulation { ms, neuron })
                .collect(),
        );
        let map = simulate_sample(net, &schedule, t_total)?;
        let len = net.n_neurons() * t_total as usize;
        if raster.is_null() {
            return Err(Failure::Null("raster"));
        }
        // SAFETY: caller provides `len` writable bytes.
        let buf = unsafe { std::slice::from_raw_parts_mut(raster, len) };
        buf.fill(0);
        for s in map.spikes() {
            buf[s.neuron as usize * t_total as usize + s.t as usize] = 1;
        }
        Ok(())
    })
}

/// Load a model written by `cttm train`.
///
/// # Safety
/// `file` must be a NUL-terminated path; `model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cttm_model_load(file: *const c_char, model: *mut *mut CttmModel) -> CttmStatus {
    guard(|| {
        let p = unsafe { path(file)? };
        let slot = unsafe { out(model, "model")? };
        let inner = Model::load(p)?;
        *slot = Box::into_raw(Box::new(CttmModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cttm_model_free(model: *mut CttmModel) {
    if !model.is_null() {
        // SAFETY: handle was created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Raw sensor channels the model expects, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cttm_model_input_channels(model: *const CttmModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.encoder.normalizer.mean.len())
}

/// Classify a row-major `rows x cols` observation. `label` receives 1 for
/// turn-giving and 0 for turn-keeping; `decision` (may be null) the SVM
/// decision value.
///
/// # Safety
/// `samples` must hold `rows * cols` doubles; `label` must be writable;
/// `decision` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cttm_model_predict(
    model: *const CttmModel,
    samples: *const f64,
    rows: usize,
    cols: usize,
    label: *mut u8,
    decision: *mut f64,
) -> CttmStatus {
    guard(|| {
        let model = &unsafe { model.as_ref() }.ok_or(Failure::Null("model"))?.inner;
        let n = rows.checked_mul(cols).ok_or(CttmError::InvalidInput("size overflow".into()))?;
        let data = unsafe { slice(samples, n, "samples")? };
        let event = RawEvent {
            event_id: 0,
            subject_id: u32::MAX,
            label: TurnLabel::Keep,
            samples: matrix(data, rows, cols)?,
        };
        let label = unsafe { out(label, "label")? };
        let d = model.decision_value(&event)?;
        *label = u8::from(d > 0.0);
        if let Some(slot) = unsafe { decision.as_mut() } {
            *slot = d;
        }
        Ok(())
    })
}
