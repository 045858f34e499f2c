//! C interface to `eulerwedge`.
//!
//! Every entry point returns an [`EwStatus`]. On failure the message is kept per thread and
//! can be read with [`ew_last_error`]. Strings handed out by the library are owned by the
//! caller and must be released with [`ew_string_free`]; handles have their own `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use eulerwedge::modular::{random_standard, RealSubspace, TomitaData};
use eulerwedge::report::{self, DemoOptions, ReportEnvelope, ReportError};
use eulerwedge::rootsys::{build_root_system, Family, RootSystem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwStatus {
    Ok = 0,
    /// The axiom suite ran and at least one check failed.
    AxiomFailure = 1,
    InvalidArgument = 2,
    NullPointer = 3,
    ComputationFailed = 4,
    Panic = 5,
}

/// An irreducible root system.
pub struct EwRootSystem {
    inner: RootSystem,
}

/// A standard subspace together with its modular data.
pub struct EwStandardSubspace {
    subspace: RealSubspace,
    tomita: TomitaData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(EwStatus, String);

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        let code = if e.is_usage() { EwStatus::InvalidArgument } else { EwStatus::ComputationFailed };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EwStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EwStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any error or panic, and converts it to a status code.
fn guard(f: impl FnOnce() -> Result<EwStatus, Failure>) -> EwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            EwStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_json<T: Serialize>(
    out: *mut *mut c_char,
    command: &str,
    params: Value,
    payload: &T,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let payload = serde_json::to_value(payload).map_err(|e| Failure(EwStatus::ComputationFailed, e.to_string()))?;
    let text = serde_json::to_string(&ReportEnvelope::new(command, params, payload))
        .map_err(|e| Failure(EwStatus::ComputationFailed, e.to_string()))?;
    out.write(CString::new(text).expect("JSON has no nul bytes").into_raw());
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn ew_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ew_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ew_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the root system of `family` ("A", "D", "E8", ...) with the given rank.
///
/// # Safety
/// `family` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_root_system_new(family: *const c_char, rank: usize, out: *mut *mut EwRootSystem) -> EwStatus {
    guard(|| {
        let fam = Family::parse(read_str(family, "family")?, rank).map_err(ReportError::from)?;
        let rs = build_root_system(fam, rank).map_err(ReportError::from)?;
        write_out(out, Box::into_raw(Box::new(EwRootSystem { inner: rs })))?;
        Ok(EwStatus::Ok)
    })
}

/// # Safety
/// `rs` must come from [`ew_root_system_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ew_root_system_free(rs: *mut EwRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// Number of roots (positive and negative).
///
/// # Safety
/// `rs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_root_system_root_count(rs: *const EwRootSystem, out: *mut usize) -> EwStatus {
    guard(|| {
        let rs = rs.as_ref().ok_or_else(|| null("root system"))?;
        let n = rs.inner.all_roots().map_err(ReportError::from)?.len();
        write_out(out, n)?;
        Ok(EwStatus::Ok)
    })
}

/// Bit `j-1` is set when the coweight `h_j` is an Euler element; `symmetric` likewise for
/// symmetric ones. Either output may be null.
///
/// # Safety
/// `rs` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ew_root_system_euler_mask(
    rs: *const EwRootSystem,
    euler: *mut u64,
    symmetric: *mut u64,
) -> EwStatus {
    guard(|| {
        let rs = rs.as_ref().ok_or_else(|| null("root system"))?;
        let mask = |set: &std::collections::BTreeSet<usize>| set.iter().fold(0u64, |m, j| m | 1 << (j - 1));
        if !euler.is_null() {
            euler.write(mask(&rs.inner.euler_coweights()));
        }
        if !symmetric.is_null() {
            symmetric.write(mask(&rs.inner.symmetric_euler_coweights()));
        }
        Ok(EwStatus::Ok)
    })
}

/// Classification report of one root system as a JSON envelope.
///
/// # Safety
/// `family` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_classify_json(family: *const c_char, rank: usize, out: *mut *mut c_char) -> EwStatus {
    guard(|| {
        let family = read_str(family, "family")?;
        let rep = report::classify(family, rank)?;
        write_json(out, "classify", json!({ "family": family, "rank": rank, "all": false }), &rep)?;
        Ok(EwStatus::Ok)
    })
}

/// Classification of every family with rank at most 8.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ew_classify_all_json(out: *mut *mut c_char) -> EwStatus {
    guard(|| {
        write_json(out, "classify", json!({ "all": true }), &report::classify_all())?;
        Ok(EwStatus::Ok)
    })
}

/// Grading dimensions of `algebra` ("sl", "so", "sp") with `params` sizes and Euler
/// element `which` ("h2", "hn", ...).
///
/// # Safety
/// Strings must be nul-terminated, `params` must point to `nparams` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_grading_json(
    algebra: *const c_char,
    params: *const usize,
    nparams: usize,
    which: *const c_char,
    out: *mut *mut c_char,
) -> EwStatus {
    guard(|| {
        let algebra = read_str(algebra, "algebra")?;
        let which = read_str(which, "which")?;
        if nparams == 0 {
            return Err(invalid("at least one size is required"));
        }
        if params.is_null() {
            return Err(null("params"));
        }
        let params = std::slice::from_raw_parts(params, nparams);
        let rep = report::grading(algebra, params, which)?;
        write_json(out, "grading", json!({ "algebra": algebra, "params": params, "euler": which }), &rep)?;
        Ok(EwStatus::Ok)
    })
}

/// Wedge orbits for the `cover`-fold Moebius cover; 0 selects the universal cover.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ew_orbits_json(cover: u64, out: *mut *mut c_char) -> EwStatus {
    guard(|| {
        let cover = (cover != 0).then_some(cover);
        let rep = report::orbits(cover)?;
        write_json(out, "orbits", json!({ "cover": cover }), &rep)?;
        Ok(EwStatus::Ok)
    })
}

/// Runs the BGL axiom suite on a model ("mobius", "affine", "orthogonal", "poincare-mock",
/// "trivial"). `cover` only matters for "mobius". Returns `AxiomFailure` with the report
/// still written when a check fails.
///
/// # Safety
/// `model` must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_bgl_demo_json(
    model: *const c_char,
    dim: usize,
    cover: u64,
    seed: u64,
    perturb: bool,
    out: *mut *mut c_char,
) -> EwStatus {
    guard(|| {
        let model = read_str(model, "model")?;
        let opts = DemoOptions { seed, perturb, cover, ..Default::default() };
        let rep = report::bgl_demo(model, dim, opts)?;
        let params = json!({
            "model": model, "dim": dim, "cover": cover, "perturb": perturb,
            "samples": opts.samples, "seed": seed, "tol": opts.tol,
        });
        write_json(out, "bgl-demo", params, &rep)?;
        Ok(if rep.passed { EwStatus::Ok } else { EwStatus::AxiomFailure })
    })
}

/// Draws a random standard subspace of C^n and computes its modular data.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ew_standard_subspace_random(n: usize, seed: u64, out: *mut *mut EwStandardSubspace) -> EwStatus {
    guard(|| {
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subspace = random_standard(n, &mut rng);
        let tomita = subspace
            .tomita()
            .map_err(|e| Failure(EwStatus::ComputationFailed, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(EwStandardSubspace { subspace, tomita })))?;
        Ok(EwStatus::Ok)
    })
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ew_standard_subspace_free(h: *mut EwStandardSubspace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Complex dimension of the ambient space.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ew_standard_subspace_dim(h: *const EwStandardSubspace) -> usize {
    h.as_ref().map_or(0, |h| h.subspace.n)
}

/// Eigenvalues of the modular operator in ascending order. `out` must hold `dim` values.
///
/// # Safety
/// `h` must be a live handle and `out` must have room for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn ew_standard_subspace_modular_spectrum(h: *const EwStandardSubspace, out: *mut f64) -> EwStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("subspace"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let mut ev = eulerwedge::modular::hermitian_eigenvalues(&h.tomita.delta);
        ev.sort_by(f64::total_cmp);
        std::slice::from_raw_parts_mut(out, ev.len()).copy_from_slice(&ev);
        Ok(EwStatus::Ok)
    })
}

/// Distance between the subspace and the one rebuilt from its modular data.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_standard_subspace_roundtrip(h: *const EwStandardSubspace, out: *mut f64) -> EwStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("subspace"))?;
        let back = h
            .tomita
            .standard_subspace()
            .map_err(|e| Failure(EwStatus::ComputationFailed, e.to_string()))?;
        write_out(out, h.subspace.distance(&back))?;
        Ok(EwStatus::Ok)
    })
}
