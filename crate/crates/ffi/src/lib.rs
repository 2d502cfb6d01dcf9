//! C ABI over `iwit`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_json`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`IwitStatus`]; on failure `iwit_last_error_message` describes the
//! most recent error on the calling thread. Strings returned through `char **`
//! must be released with [`iwit_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_double, c_int, size_t};

use iwit::compatibility::{joint_feasibility, Verdict};
use iwit::discrimination::{p_post_opt, p_prior_opt};
use iwit::ensemble::{mub_ensemble, NoiseVector, PartitionedEnsemble};
use iwit::mub::{boundary_curve, fourier_mub, noisy_mub_pair, p_post_mub, p_prior_mub, region_membership, Region, SmearingVector};
use iwit::povm::MeasurementPair;
use iwit::witness::{eval_witness, witness_from_ensemble, Witness};
use iwit::IwitError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ValidationError = 4,
    NoConvergence = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwitVerdict {
    Compatible = 0,
    Incompatible = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IwitRegion {
    Compatible = 0,
    Boundary = 1,
    Incompatible = 2,
}

/// Opaque measurement pair.
pub struct IwitPair(MeasurementPair);

/// Opaque partitioned state ensemble.
pub struct IwitEnsemble(PartitionedEnsemble);

/// Opaque incompatibility witness.
pub struct IwitWitness(Witness);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("nul bytes removed"));
}

fn status_of(e: &IwitError) -> IwitStatus {
    match e {
        IwitError::MaxIterExceeded { .. } | IwitError::ConvergenceFailure => IwitStatus::NoConvergence,
        IwitError::InvalidArgument(_)
        | IwitError::InvalidDimension(_)
        | IwitError::GammaOutOfRange { .. }
        | IwitError::MuOutOfRange { .. }
        | IwitError::LambdaOutOfRange(_)
        | IwitError::ThetaOutOfRange { .. }
        | IwitError::DeltaOutOfRange { .. } => IwitStatus::InvalidArgument,
        _ => IwitStatus::ValidationError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (IwitStatus, String)>) -> IwitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IwitStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IwitStatus::Panic
        }
    }
}

fn core<T>(r: iwit::Result<T>) -> Result<T, (IwitStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (IwitStatus, String) {
    (IwitStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (IwitStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|e| (IwitStatus::ParseError, format!("input is not UTF-8: {e}")))
}

unsafe fn parse<T: serde::de::DeserializeOwned>(s: *const c_char) -> Result<T, (IwitStatus, String)> {
    let text = read_str(s)?;
    serde_json::from_str(text).map_err(|e| (IwitStatus::ParseError, e.to_string()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (IwitStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn boxed<T>(out: *mut *mut T, v: T) -> Result<(), (IwitStatus, String)> {
    put(out, Box::into_raw(Box::new(v)))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, (IwitStatus, String)> {
    h.as_ref().ok_or_else(null)
}

unsafe fn json_out<T: serde::Serialize>(v: &T, out: *mut *mut c_char) -> Result<(), (IwitStatus, String)> {
    let s = serde_json::to_string(v).map_err(|e| (IwitStatus::ValidationError, e.to_string()))?;
    put(out, CString::new(s).expect("JSON has no nul bytes").into_raw())
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iwit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies the last error message into `buf` (always nul-terminated when
/// `len > 0`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn iwit_last_error_copy(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn iwit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iwit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_pair_from_json(json: *const c_char, out: *mut *mut IwitPair) -> IwitStatus {
    guard(|| boxed(out, IwitPair(parse(json)?)))
}

/// Noisy Fourier-MUB pair with smearings `gamma_phi`, `gamma_psi`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_pair_noisy_mub(dim: size_t, gamma_phi: c_double, gamma_psi: c_double, out: *mut *mut IwitPair) -> IwitStatus {
    guard(|| {
        if dim < 2 {
            return Err((IwitStatus::InvalidArgument, IwitError::InvalidDimension(dim).to_string()));
        }
        let p = core(noisy_mub_pair(&fourier_mub(dim), SmearingVector::new(gamma_phi, gamma_psi)))?;
        boxed(out, IwitPair(p))
    })
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_pair_to_json(pair: *const IwitPair, out: *mut *mut c_char) -> IwitStatus {
    guard(|| json_out(&handle(pair)?.0, out))
}

/// # Safety
/// `pair` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iwit_pair_free(pair: *mut IwitPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_ensemble_from_json(json: *const c_char, out: *mut *mut IwitEnsemble) -> IwitStatus {
    guard(|| boxed(out, IwitEnsemble(parse(json)?)))
}

/// Fourier-MUB ensemble with noise parameters `mu_phi`, `mu_psi`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_ensemble_mub(dim: size_t, mu_phi: c_double, mu_psi: c_double, out: *mut *mut IwitEnsemble) -> IwitStatus {
    guard(|| {
        if dim < 2 {
            return Err((IwitStatus::InvalidArgument, IwitError::InvalidDimension(dim).to_string()));
        }
        let e = core(mub_ensemble(NoiseVector::new(mu_phi, mu_psi), &fourier_mub(dim)))?;
        boxed(out, IwitEnsemble(e))
    })
}

/// # Safety
/// `ens` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_ensemble_to_json(ens: *const IwitEnsemble, out: *mut *mut c_char) -> IwitStatus {
    guard(|| json_out(&handle(ens)?.0, out))
}

/// # Safety
/// `ens` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iwit_ensemble_free(ens: *mut IwitEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Optimal guessing probability with the block announced before measuring.
///
/// # Safety
/// `ens` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_p_prior(ens: *const IwitEnsemble, out: *mut c_double) -> IwitStatus {
    guard(|| put(out, core(p_prior_opt(&handle(ens)?.0))?.value))
}

/// Optimal guessing probability with the block announced after measuring.
///
/// # Safety
/// `ens` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_p_post(ens: *const IwitEnsemble, out: *mut c_double) -> IwitStatus {
    guard(|| put(out, core(p_post_opt(&handle(ens)?.0))?.value))
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_witness_from_json(json: *const c_char, out: *mut *mut IwitWitness) -> IwitStatus {
    guard(|| boxed(out, IwitWitness(parse(json)?)))
}

/// Witness of `ens`; `delta` is used instead of `P_post` when `override_delta` is nonzero.
///
/// # Safety
/// `ens` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_witness_from_ensemble(
    ens: *const IwitEnsemble,
    override_delta: c_int,
    delta: c_double,
    out: *mut *mut IwitWitness,
) -> IwitStatus {
    guard(|| {
        let ov = (override_delta != 0).then_some(delta);
        boxed(out, IwitWitness(core(witness_from_ensemble(&handle(ens)?.0, ov))?))
    })
}

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_witness_eval(w: *const IwitWitness, pair: *const IwitPair, out: *mut c_double) -> IwitStatus {
    guard(|| put(out, core(eval_witness(&handle(w)?.0, &handle(pair)?.0))?))
}

/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_witness_to_json(w: *const IwitWitness, out: *mut *mut c_char) -> IwitStatus {
    guard(|| json_out(&handle(w)?.0, out))
}

/// # Safety
/// `w` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iwit_witness_free(w: *mut IwitWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Numerical joint-measurability decision. `residual` may be null.
///
/// # Safety
/// `pair` must be a live handle; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_joint_feasibility(
    pair: *const IwitPair,
    tol: c_double,
    max_iter: size_t,
    verdict: *mut IwitVerdict,
    residual: *mut c_double,
) -> IwitStatus {
    guard(|| {
        let r = core(joint_feasibility(&handle(pair)?.0, tol, max_iter))?;
        let v = match r.verdict {
            Verdict::Compatible => IwitVerdict::Compatible,
            Verdict::Incompatible => IwitVerdict::Incompatible,
            Verdict::Undetermined => IwitVerdict::Undetermined,
        };
        put(verdict, v)?;
        if !residual.is_null() {
            residual.write(r.residual);
        }
        Ok(())
    })
}

/// Closed-form `P_prior` of the Fourier-MUB ensemble.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_mub_p_prior(dim: size_t, mu_phi: c_double, mu_psi: c_double, out: *mut c_double) -> IwitStatus {
    guard(|| put(out, core(p_prior_mub(dim, NoiseVector::new(mu_phi, mu_psi)))?))
}

/// Closed-form `P_post` of the Fourier-MUB ensemble.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_mub_p_post(dim: size_t, mu_phi: c_double, mu_psi: c_double, out: *mut c_double) -> IwitStatus {
    guard(|| put(out, core(p_post_mub(dim, NoiseVector::new(mu_phi, mu_psi)))?))
}

/// Point of the compatibility boundary at angle `theta`.
///
/// # Safety
/// Both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_boundary_curve(dim: size_t, theta: c_double, gamma_phi: *mut c_double, gamma_psi: *mut c_double) -> IwitStatus {
    guard(|| {
        let g = core(boundary_curve(dim, theta))?;
        put(gamma_phi, g.gamma_phi)?;
        put(gamma_psi, g.gamma_psi)
    })
}

/// Closed-form membership of the noisy MUB pair `(gamma_phi, gamma_psi)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iwit_region(dim: size_t, gamma_phi: c_double, gamma_psi: c_double, out: *mut IwitRegion) -> IwitStatus {
    guard(|| {
        let r = core(region_membership(dim, SmearingVector::new(gamma_phi, gamma_psi)))?;
        put(out, match r {
            Region::Compatible => IwitRegion::Compatible,
            Region::Boundary => IwitRegion::Boundary,
            Region::Incompatible => IwitRegion::Incompatible,
        })
    })
}
