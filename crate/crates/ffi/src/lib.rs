//! C ABI over `koopman_legendre`.
//!
//! Every fallible call returns a [`KlStatus`]. On failure a message is kept
//! per thread and can be read with [`kl_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use koopman_legendre::cli::{build_model, unit_box_point};
use koopman_legendre::{parse_system_config, KoopmanError, KoopmanModel, SystemSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    BufferTooSmall = 5,
    NearDefective = 6,
    NonFinite = 7,
    Overflow = 8,
    Panic = 9,
}

/// A parsed and validated system configuration.
pub struct KlSystem {
    spec: SystemSpec,
}

/// A decomposed Koopman model bound to its system's domain.
pub struct KlModel {
    spec: SystemSpec,
    model: KoopmanModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &KoopmanError) -> KlStatus {
    match err {
        KoopmanError::Schema { .. } | KoopmanError::Validation(_) => KlStatus::Config,
        KoopmanError::NearDefective { .. } => KlStatus::NearDefective,
        KoopmanError::NonFinite(_) => KlStatus::NonFinite,
        KoopmanError::Overflow { .. } => KlStatus::Overflow,
        _ => KlStatus::InvalidArgument,
    }
}

fn fail(status: KlStatus, msg: impl Into<String>) -> KlStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> KlStatus) -> KlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(KlStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: Result<T, KoopmanError>) -> Result<T, KlStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

/// Parse a JSON system configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_system_from_json(json: *const c_char, out: *mut *mut KlSystem) -> KlStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(KlStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(KlStatus::InvalidUtf8, "configuration is not valid UTF-8"),
        };
        match lift(parse_system_config(text)) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(KlSystem { spec }));
                KlStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `system` must come from [`kl_system_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kl_system_free(system: *mut KlSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of state variables, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kl_system_dim(system: *const KlSystem) -> usize {
    system.as_ref().map_or(0, |s| s.spec.dim())
}

/// Build the Koopman model at `order`. Pass a negative order to use the
/// configured one.
///
/// # Safety
/// `system` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_model_build(system: *const KlSystem, order: i32, out: *mut *mut KlModel) -> KlStatus {
    guard(|| {
        let Some(system) = system.as_ref() else {
            return fail(KlStatus::NullPointer, "null system");
        };
        if out.is_null() {
            return fail(KlStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let mut spec = system.spec.clone();
        if order >= 0 {
            spec.order = order as usize;
        }
        match lift(build_model(&spec)) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(KlModel { spec, model }));
                KlStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `model` must come from [`kl_model_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kl_model_free(model: *mut KlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Basis size `n`, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kl_model_basis_size(model: *const KlModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.basis().len())
}

/// Number of observables, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kl_model_observable_count(model: *const KlModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.observable_names().len())
}

/// Copy the sorted eigenvalues into `re` and `im`, each of length `len >= n`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_model_eigenvalues(
    model: *const KlModel,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> KlStatus {
    guard(|| {
        let Some(model) = model.as_ref() else {
            return fail(KlStatus::NullPointer, "null model");
        };
        if re.is_null() || im.is_null() {
            return fail(KlStatus::NullPointer, "null output buffer");
        }
        let eig = model.model.eigenvalues();
        if len < eig.len() {
            return fail(
                KlStatus::BufferTooSmall,
                format!("need {} entries, got {len}", eig.len()),
            );
        }
        let (re, im) = (slice::from_raw_parts_mut(re, len), slice::from_raw_parts_mut(im, len));
        for (j, z) in eig.iter().enumerate() {
            re[j] = z.re;
            im[j] = z.im;
        }
        KlStatus::Ok
    })
}

/// Copy `K` row-major into `out`, which holds `len >= n*n` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_model_koopman_matrix(model: *const KlModel, out: *mut f64, len: usize) -> KlStatus {
    guard(|| {
        let Some(model) = model.as_ref() else {
            return fail(KlStatus::NullPointer, "null model");
        };
        if out.is_null() {
            return fail(KlStatus::NullPointer, "null output buffer");
        }
        let k = model.model.koopman_matrix();
        let n = k.nrows();
        if len < n * n {
            return fail(KlStatus::BufferTooSmall, format!("need {} entries, got {len}", n * n));
        }
        let out = slice::from_raw_parts_mut(out, len);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = k[(i, j)];
            }
        }
        KlStatus::Ok
    })
}

/// Evaluate the observables from state `x0` (original coordinates, length
/// `dim`) at `num_times` increasing times. Results go to `out` as
/// `out[t * observable_count + g]`. `max_imag` may be null.
///
/// # Safety
/// Pointers must reference buffers of the stated lengths.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn kl_model_propagate(
    model: *const KlModel,
    x0: *const f64,
    dim: usize,
    times: *const f64,
    num_times: usize,
    out: *mut f64,
    out_len: usize,
    max_imag: *mut f64,
) -> KlStatus {
    guard(|| {
        let Some(model) = model.as_ref() else {
            return fail(KlStatus::NullPointer, "null model");
        };
        if x0.is_null() || times.is_null() || out.is_null() {
            return fail(KlStatus::NullPointer, "null buffer");
        }
        let g = model.model.observable_names().len();
        if out_len < g * num_times {
            return fail(
                KlStatus::BufferTooSmall,
                format!("need {} entries, got {out_len}", g * num_times),
            );
        }
        let x0 = slice::from_raw_parts(x0, dim);
        let times = slice::from_raw_parts(times, num_times);
        let traj = match lift(unit_box_point(&model.spec, x0).and_then(|y0| model.model.solve(&y0, times))) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let out = slice::from_raw_parts_mut(out, out_len);
        for (obs, series) in traj.values.iter().enumerate() {
            for (t, v) in series.iter().enumerate() {
                out[t * g + obs] = *v;
            }
        }
        if let Some(mi) = max_imag.as_mut() {
            *mi = traj.max_imag;
        }
        KlStatus::Ok
    })
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
