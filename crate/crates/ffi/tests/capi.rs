use std::ffi::{CStr, CString};
use std::ptr;

use koopman_legendre_ffi::*;

const DUFFING: &str = include_str!("../../../configs/duffing.json");
const HARMONIC: &str = include_str!("../../../configs/harmonic.json");

fn system(json: &str) -> *mut KlSystem {
    let text = CString::new(json).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { kl_system_from_json(text.as_ptr(), &mut sys) }, KlStatus::Ok);
    sys
}

fn last_error() -> String {
    let p = kl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn harmonic_round_trip() {
    let sys = system(HARMONIC);
    assert_eq!(unsafe { kl_system_dim(sys) }, 2);
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { kl_model_build(sys, -1, &mut model) }, KlStatus::Ok);
    assert_eq!(unsafe { kl_model_basis_size(model) }, 10);
    assert_eq!(unsafe { kl_model_observable_count(model) }, 2);

    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.2).collect();
    let mut out = vec![0.0; 2 * times.len()];
    let mut max_imag = f64::NAN;
    let status = unsafe {
        kl_model_propagate(
            model,
            [1.0, 0.0].as_ptr(),
            2,
            times.as_ptr(),
            times.len(),
            out.as_mut_ptr(),
            out.len(),
            &mut max_imag,
        )
    };
    assert_eq!(status, KlStatus::Ok);
    for (k, t) in times.iter().enumerate() {
        assert!((out[2 * k] - t.cos()).abs() < 1e-8);
        assert!((out[2 * k + 1] + t.sin()).abs() < 1e-8);
    }
    assert!(max_imag < 1e-8);

    let mut re = vec![0.0; 10];
    let mut im = vec![0.0; 10];
    assert_eq!(
        unsafe { kl_model_eigenvalues(model, re.as_mut_ptr(), im.as_mut_ptr(), 10) },
        KlStatus::Ok
    );
    assert!(re.iter().all(|r| r.abs() < 1e-8));
    assert!(im.iter().any(|i| (i - 1.0).abs() < 1e-8));

    unsafe {
        kl_model_free(model);
        kl_system_free(sys);
    }
}

#[test]
fn koopman_matrix_is_row_major() {
    let sys = system(DUFFING);
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { kl_model_build(sys, 1, &mut model) }, KlStatus::Ok);
    let mut k = vec![f64::NAN; 9];
    assert_eq!(
        unsafe { kl_model_koopman_matrix(model, k.as_mut_ptr(), 9) },
        KlStatus::Ok
    );
    // order 1: L1 ~ q, L2 ~ p, dq/dt = p
    assert!(k[3 + 2] > 0.99 && k[3 + 2] < 1.01, "{k:?}");
    assert!(k[2 * 3 + 1] < -0.99, "{k:?}");
    assert_eq!(k[0], 0.0);
    unsafe {
        kl_model_free(model);
        kl_system_free(sys);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new(r#"{"name":"x"}"#).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { kl_system_from_json(bad.as_ptr(), &mut sys) }, KlStatus::Config);
    assert!(sys.is_null());
    assert!(last_error().contains("states"));

    assert_eq!(
        unsafe { kl_system_from_json(ptr::null(), &mut sys) },
        KlStatus::NullPointer
    );

    let sys = system(DUFFING);
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { kl_model_build(sys, 0, &mut model) }, KlStatus::Config);
    assert!(model.is_null());
    assert!(last_error().contains("order"));

    assert_eq!(unsafe { kl_model_build(sys, -1, &mut model) }, KlStatus::Ok);
    let mut small = [0.0; 3];
    let status = unsafe { kl_model_koopman_matrix(model, small.as_mut_ptr(), 3) };
    assert_eq!(status, KlStatus::BufferTooSmall);
    let mut out = [0.0; 4];
    let status = unsafe {
        kl_model_propagate(
            model,
            [1.0].as_ptr(),
            1,
            [0.0, 1.0].as_ptr(),
            2,
            out.as_mut_ptr(),
            4,
            ptr::null_mut(),
        )
    };
    assert_eq!(status, KlStatus::InvalidArgument);
    let status = unsafe {
        kl_model_propagate(
            model,
            [1.0, 0.0].as_ptr(),
            2,
            [1.0, 0.0].as_ptr(),
            2,
            out.as_mut_ptr(),
            4,
            ptr::null_mut(),
        )
    };
    assert_eq!(status, KlStatus::InvalidArgument);

    unsafe {
        kl_model_free(model);
        kl_system_free(sys);
        kl_model_free(ptr::null_mut());
        kl_system_free(ptr::null_mut());
    }
    assert_eq!(unsafe { kl_model_basis_size(ptr::null()) }, 0);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(kl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/koopman_legendre.h");
    for name in [
        "kl_system_from_json",
        "kl_system_free",
        "kl_system_dim",
        "kl_model_build",
        "kl_model_free",
        "kl_model_basis_size",
        "kl_model_observable_count",
        "kl_model_eigenvalues",
        "kl_model_koopman_matrix",
        "kl_model_propagate",
        "kl_last_error_message",
        "kl_version",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
    assert!(header.contains("typedef struct KlModel KlModel;"));
}
