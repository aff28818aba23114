//! C ABI over `polygon_gpt`.
//!
//! Every fallible function returns a [`PgStatus`]; on failure a message is
//! available from [`pg_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polygon_gpt::composite::{is_valid_state_with, BipartiteState};
use polygon_gpt::enumerate::{classify_entangled, enumerate_extreme_states, EntanglementClass, Enumeration, VertexKind};
use polygon_gpt::library::{named_state, phi_j};
use polygon_gpt::mixture::noise_thresholds;
use polygon_gpt::nonlocality::{chsh_max, hardy_scan, MeasurementLabel, Orientation};
use polygon_gpt::symmetry::{burnside_orbit_count, Representative};
use polygon_gpt::{build_model, joint_prob, Error, Mat3, PolygonModel, Tolerances, Vec3};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    InvalidParameter = 1,
    InternalInconsistency = 2,
    Unsupported = 3,
    NullPointer = 4,
    Panic = 5,
}

/// An n-gon model.
pub struct PgModel {
    inner: PolygonModel,
}

/// Extreme states of a bipartite composition with their classes.
pub struct PgEnumeration {
    enumeration: Enumeration,
    classes: Vec<EntanglementClass>,
}

/// Measurement label: effect index (1-based) and orientation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PgLabel {
    pub effect: u32,
    /// True when eᵢ carries the `+` outcome.
    pub plus: bool,
}

/// Best Hardy witness of an exhaustive scan.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PgHardyResult {
    pub found: bool,
    pub success: f64,
    /// M1, M2, N1, N2.
    pub measurements: [PgLabel; 4],
    pub residuals: [f64; 3],
    pub tie_count: usize,
    pub post_quantum: bool,
}

/// Noise thresholds of pΦ_J + (1−p)u⊗u.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PgThresholds {
    pub n: u32,
    pub b_max: f64,
    pub p_e: f64,
    pub p_nl: f64,
    pub gap_exists: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PgStatus, msg: &str) -> PgStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PgStatus {
    let status = match e {
        Error::InvalidParameter(_) => PgStatus::InvalidParameter,
        Error::InternalInconsistency(_) => PgStatus::InternalInconsistency,
        Error::Unsupported(_) => PgStatus::Unsupported,
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> PgStatus) -> PgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PgStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(PgStatus::Panic, "panic inside polygon-gpt"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(PgStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

unsafe fn read_state(phi: *const f64) -> BipartiteState {
    let mut m = [0.0; 9];
    ptr::copy_nonoverlapping(phi, m.as_mut_ptr(), 9);
    BipartiteState(Mat3(m))
}

unsafe fn read_vec(v: *const f64) -> Vec3 {
    let mut a = [0.0; 3];
    ptr::copy_nonoverlapping(v, a.as_mut_ptr(), 3);
    Vec3(a)
}

unsafe fn write_state(state: &BipartiteState, out: *mut f64) {
    ptr::copy_nonoverlapping(state.entries().as_ptr(), out, 9);
}

fn label(l: MeasurementLabel) -> PgLabel {
    PgLabel {
        effect: l.effect as u32,
        plus: l.orientation == Orientation::Plus,
    }
}

/// Message of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the n-gon model (`n ≥ 4`).
#[no_mangle]
pub unsafe extern "C" fn pg_model_new(n: u32, out: *mut *mut PgModel) -> PgStatus {
    non_null!(out);
    guard(|| match build_model(n as usize) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(PgModel { inner }));
            PgStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Releases a model. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pg_model_free(model: *mut PgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Polygon order n, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pg_model_n(model: *const PgModel) -> u32 {
    model.as_ref().map_or(0, |m| m.inner.n as u32)
}

/// Pure state ωᵢ (1-based) written to `out[3]`.
#[no_mangle]
pub unsafe extern "C" fn pg_model_state(model: *const PgModel, i: u32, out: *mut f64) -> PgStatus {
    non_null!(model, out);
    guard(|| match (*model).inner.state(i as usize) {
        Ok(v) => {
            ptr::copy_nonoverlapping(v.0.as_ptr(), out, 3);
            PgStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Ray-extremal effect eᵢ (1-based) written to `out[3]`.
#[no_mangle]
pub unsafe extern "C" fn pg_model_effect(model: *const PgModel, i: u32, out: *mut f64) -> PgStatus {
    non_null!(model, out);
    guard(|| match (*model).inner.effect(i as usize) {
        Ok(v) => {
            ptr::copy_nonoverlapping(v.0.as_ptr(), out, 3);
            PgStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Library state by name ("J", "H", "I".."VI") written row-major to `out[9]`.
#[no_mangle]
pub unsafe extern "C" fn pg_named_state(model: *const PgModel, name: *const c_char, out: *mut f64) -> PgStatus {
    non_null!(model, name, out);
    guard(|| {
        let Ok(name) = CStr::from_ptr(name).to_str() else {
            return fail(PgStatus::InvalidParameter, "state name is not UTF-8");
        };
        match named_state((*model).inner.n, name) {
            Some(s) => {
                write_state(&s, out);
                PgStatus::Ok
            }
            None => fail(PgStatus::InvalidParameter, &format!("unknown state '{name}'")),
        }
    })
}

/// Maximally entangled state Φ_J written to `out[9]`.
#[no_mangle]
pub unsafe extern "C" fn pg_phi_j(model: *const PgModel, out: *mut f64) -> PgStatus {
    non_null!(model, out);
    guard(|| {
        write_state(&phi_j(&(*model).inner), out);
        PgStatus::Ok
    })
}

/// Number of D₂ₙ×D₂ₙ orbits on 8-subsets of product effects (n ≤ 8).
#[no_mangle]
pub unsafe extern "C" fn pg_burnside_orbit_count(model: *const PgModel, out: *mut u64) -> PgStatus {
    non_null!(model, out);
    guard(|| match burnside_orbit_count(&(*model).inner) {
        Ok(c) => {
            *out = c;
            PgStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Whether the row-major matrix `phi[9]` is a valid bipartite state.
#[no_mangle]
pub unsafe extern "C" fn pg_is_valid_state(model: *const PgModel, phi: *const f64, tol: f64, out: *mut bool) -> PgStatus {
    non_null!(model, phi, out);
    guard(|| {
        *out = is_valid_state_with(&read_state(phi), &(*model).inner, tol);
        PgStatus::Ok
    })
}

/// eᵀΦf for effects `e[3]`, `f[3]` and state `phi[9]`.
#[no_mangle]
pub unsafe extern "C" fn pg_joint_prob(e: *const f64, f: *const f64, phi: *const f64, out: *mut f64) -> PgStatus {
    non_null!(e, f, phi, out);
    guard(|| {
        *out = joint_prob(&read_vec(e), &read_vec(f), &read_state(phi));
        PgStatus::Ok
    })
}

/// Exhaustive Hardy scan over extremal dichotomic measurements.
#[no_mangle]
pub unsafe extern "C" fn pg_hardy_scan(model: *const PgModel, phi: *const f64, tol: f64, out: *mut PgHardyResult) -> PgStatus {
    non_null!(model, phi, out);
    guard(|| {
        let scan = hardy_scan(&read_state(phi), &(*model).inner, tol);
        let mut r = PgHardyResult {
            tie_count: scan.ties.len(),
            post_quantum: scan.post_quantum,
            ..Default::default()
        };
        if let Some(w) = &scan.best {
            r.found = true;
            r.success = w.success;
            r.residuals = w.residuals;
            let t = w.measurements;
            r.measurements = [label(t.alice[0]), label(t.alice[1]), label(t.bob[0]), label(t.bob[1])];
        }
        *out = r;
        PgStatus::Ok
    })
}

/// Maximal |CHSH| over extremal dichotomic measurements.
#[no_mangle]
pub unsafe extern "C" fn pg_chsh_max(model: *const PgModel, phi: *const f64, out: *mut f64) -> PgStatus {
    non_null!(model, phi, out);
    guard(|| {
        *out = chsh_max(&read_state(phi), &(*model).inner).value;
        PgStatus::Ok
    })
}

/// Entanglement and CHSH thresholds for the model's Φ_J under u⊗u noise.
#[no_mangle]
pub unsafe extern "C" fn pg_noise_thresholds(model: *const PgModel, out: *mut PgThresholds) -> PgStatus {
    non_null!(model, out);
    guard(|| {
        let m = &(*model).inner;
        let b = chsh_max(&phi_j(m), m).value;
        match noise_thresholds(m, b) {
            Ok(r) => {
                *out = PgThresholds {
                    n: r.n as u32,
                    b_max: r.b_max,
                    p_e: r.p_e,
                    p_nl: r.p_nl,
                    gap_exists: r.gap_exists,
                };
                PgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Enumerates and classifies the extreme bipartite states (n ≤ 8).
#[no_mangle]
pub unsafe extern "C" fn pg_enumerate(model: *const PgModel, out: *mut *mut PgEnumeration) -> PgStatus {
    non_null!(model, out);
    guard(|| {
        let m = &(*model).inner;
        let result = enumerate_extreme_states(m, Representative::Min, &Tolerances::default())
            .and_then(|e| classify_entangled(m, &e).map(|c| (e, c)));
        match result {
            Ok((enumeration, classes)) => {
                *out = Box::into_raw(Box::new(PgEnumeration { enumeration, classes }));
                PgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases an enumeration. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_free(e: *mut PgEnumeration) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Total number of extreme states.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_vertex_count(e: *const PgEnumeration) -> usize {
    e.as_ref().map_or(0, |e| e.enumeration.total())
}

/// Number of product extreme states.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_product_count(e: *const PgEnumeration) -> usize {
    e.as_ref().map_or(0, |e| e.enumeration.product_count())
}

/// Vertex `index` written to `out[9]`; `is_product` tells its kind.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_vertex(
    e: *const PgEnumeration,
    index: usize,
    out: *mut f64,
    is_product: *mut bool,
) -> PgStatus {
    non_null!(e, out, is_product);
    guard(|| match (&(*e).enumeration.vertices).get(index) {
        Some(v) => {
            write_state(&v.state, out);
            *is_product = matches!(v.kind, VertexKind::Product { .. });
            PgStatus::Ok
        }
        None => fail(PgStatus::InvalidParameter, "vertex index out of range"),
    })
}

/// Number of entanglement classes.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_class_count(e: *const PgEnumeration) -> usize {
    e.as_ref().map_or(0, |e| e.classes.len())
}

/// Size of class `index`; classes are sorted by size.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_class_size(e: *const PgEnumeration, index: usize, out: *mut usize) -> PgStatus {
    non_null!(e, out);
    guard(|| match (&(*e).classes).get(index) {
        Some(c) => {
            *out = c.size;
            PgStatus::Ok
        }
        None => fail(PgStatus::InvalidParameter, "class index out of range"),
    })
}

/// Representative of class `index` written to `out[9]`.
#[no_mangle]
pub unsafe extern "C" fn pg_enumeration_class_representative(
    e: *const PgEnumeration,
    index: usize,
    out: *mut f64,
) -> PgStatus {
    non_null!(e, out);
    guard(|| match (&(*e).classes).get(index) {
        Some(c) => {
            write_state(&c.representative, out);
            PgStatus::Ok
        }
        None => fail(PgStatus::InvalidParameter, "class index out of range"),
    })
}
