use std::ffi::{CStr, CString};
use std::ptr;

use polygon_gpt_ffi::*;

fn model(n: u32) -> *mut PgModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pg_model_new(n, &mut m) }, PgStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pg_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn model_lifecycle_and_errors() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pg_model_new(3, &mut m) }, PgStatus::InvalidParameter);
    assert!(m.is_null());
    assert!(last_error().contains("at least 4"));
    assert_eq!(unsafe { pg_model_new(4, ptr::null_mut()) }, PgStatus::NullPointer);

    let m = model(5);
    assert_eq!(unsafe { pg_model_n(m) }, 5);
    let mut v = [0.0; 3];
    assert_eq!(unsafe { pg_model_state(m, 1, v.as_mut_ptr()) }, PgStatus::Ok);
    assert!(last_error().is_empty());
    assert_eq!(v[2], 1.0);
    assert_eq!(unsafe { pg_model_effect(m, 6, v.as_mut_ptr()) }, PgStatus::InvalidParameter);
    unsafe { pg_model_free(m) };
    unsafe { pg_model_free(ptr::null_mut()) };
}

#[test]
fn orbit_counts() {
    for (n, want) in [(4, 283u64), (5, 11103)] {
        let m = model(n);
        let mut c = 0;
        assert_eq!(unsafe { pg_burnside_orbit_count(m, &mut c) }, PgStatus::Ok);
        assert_eq!(c, want);
        unsafe { pg_model_free(m) };
    }
    let m = model(9);
    let mut c = 0;
    assert_eq!(unsafe { pg_burnside_orbit_count(m, &mut c) }, PgStatus::InvalidParameter);
    unsafe { pg_model_free(m) };
}

#[test]
fn states_and_probabilities() {
    let m = model(5);
    let mut phi = [0.0; 9];
    let name = CString::new("H").unwrap();
    assert_eq!(unsafe { pg_named_state(m, name.as_ptr(), phi.as_mut_ptr()) }, PgStatus::Ok);
    let mut ok = false;
    assert_eq!(unsafe { pg_is_valid_state(m, phi.as_ptr(), 1e-9, &mut ok) }, PgStatus::Ok);
    assert!(ok);
    let bad = CString::new("Z").unwrap();
    assert_eq!(unsafe { pg_named_state(m, bad.as_ptr(), phi.as_mut_ptr()) }, PgStatus::InvalidParameter);

    let mut r = PgHardyResult::default();
    assert_eq!(unsafe { pg_named_state(m, name.as_ptr(), phi.as_mut_ptr()) }, PgStatus::Ok);
    assert_eq!(unsafe { pg_hardy_scan(m, phi.as_ptr(), 1e-9, &mut r) }, PgStatus::Ok);
    assert!(r.found && r.post_quantum);
    assert!((r.success - (1.0 - 0.4 * 5f64.sqrt())).abs() < 1e-12);
    assert_eq!(r.measurements[0], PgLabel { effect: 1, plus: true });

    let (mut e, mut f) = ([0.0; 3], [0.0; 3]);
    unsafe {
        pg_model_effect(m, 1, e.as_mut_ptr());
        pg_model_effect(m, 1, f.as_mut_ptr());
    }
    let mut uu = [0.0; 9];
    uu[8] = 1.0;
    let mut p = 0.0;
    assert_eq!(unsafe { pg_joint_prob(e.as_ptr(), f.as_ptr(), uu.as_ptr(), &mut p) }, PgStatus::Ok);
    assert!((p - 0.2).abs() < 1e-12);
    unsafe { pg_model_free(m) };
}

#[test]
fn chsh_and_thresholds() {
    let m = model(4);
    let mut phi = [0.0; 9];
    assert_eq!(unsafe { pg_phi_j(m, phi.as_mut_ptr()) }, PgStatus::Ok);
    let mut b = 0.0;
    assert_eq!(unsafe { pg_chsh_max(m, phi.as_ptr(), &mut b) }, PgStatus::Ok);
    assert!((b - 4.0).abs() < 1e-9);
    let mut t = PgThresholds::default();
    assert_eq!(unsafe { pg_noise_thresholds(m, &mut t) }, PgStatus::Ok);
    assert!(!t.gap_exists && (t.p_nl - 0.5).abs() < 1e-12);
    unsafe { pg_model_free(m) };

    let m = model(5);
    assert_eq!(unsafe { pg_noise_thresholds(m, &mut t) }, PgStatus::Ok);
    assert!(t.gap_exists && (t.p_e - 0.618033988749895).abs() < 1e-9);
    unsafe { pg_model_free(m) };
}

#[test]
fn enumeration_handle() {
    let m = model(4);
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { pg_enumerate(m, &mut e) }, PgStatus::Ok);
    unsafe {
        assert_eq!(pg_enumeration_vertex_count(e), 24);
        assert_eq!(pg_enumeration_product_count(e), 16);
        assert_eq!(pg_enumeration_class_count(e), 1);
        let mut size = 0;
        assert_eq!(pg_enumeration_class_size(e, 0, &mut size), PgStatus::Ok);
        assert_eq!(size, 8);
        let mut phi = [0.0; 9];
        let mut product = false;
        assert_eq!(pg_enumeration_vertex(e, 0, phi.as_mut_ptr(), &mut product), PgStatus::Ok);
        assert!(product);
        assert_eq!(pg_enumeration_vertex(e, 23, phi.as_mut_ptr(), &mut product), PgStatus::Ok);
        assert!(!product);
        assert_eq!(pg_enumeration_vertex(e, 24, phi.as_mut_ptr(), &mut product), PgStatus::InvalidParameter);
        assert_eq!(pg_enumeration_class_representative(e, 0, phi.as_mut_ptr()), PgStatus::Ok);
        let mut ok = false;
        pg_is_valid_state(m, phi.as_ptr(), 1e-9, &mut ok);
        assert!(ok);
        pg_enumeration_free(e);
        assert_eq!(pg_enumeration_vertex_count(ptr::null()), 0);
        pg_model_free(m);
    }
}

#[test]
fn header_declares_api() {
    let header = include_str!("../include/polygon_gpt.h");
    for sym in ["pg_model_new", "pg_hardy_scan", "pg_enumerate", "PG_STATUS_NULL_POINTER", "typedef struct PgModel PgModel"] {
        assert!(header.contains(sym), "{sym}");
    }
}
