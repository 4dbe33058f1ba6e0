//! C ABI over `aid-core`.
//!
//! Priors and structures cross the boundary as opaque handles created from
//! JSON text. Every fallible call returns an [`AidStatus`]; on failure the
//! message is available from [`aid_last_error`] on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and must
//! be released with [`aid_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use aid_core::constructors::{build_named, BuildParams};
use aid_core::{evaluate, verify_strict, Error, InfoStructure, StrategyProfile, SymmetricPrior};

/// Opaque prior handle.
pub struct AidPrior(SymmetricPrior);

/// Opaque information-structure handle.
pub struct AidStructure(InfoStructure);

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AidStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON, an invalid prior or structure, or a bad parameter.
    InvalidInput = 3,
    /// A constructor could not satisfy its feasibility conditions.
    Infeasible = 4,
    /// The library panicked; the handle arguments are left untouched.
    Panic = 5,
}

/// Exact payoffs under the prescribed strategies.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AidPayoff {
    pub revenue: f64,
    pub bidder_surplus: f64,
    pub welfare: f64,
    pub tie_mass: f64,
}

/// Summary of an equilibrium audit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AidVerdict {
    pub is_bne: bool,
    pub is_strict: bool,
    pub worst_gain: f64,
    pub strict_margin: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AidStatus {
    if e.is_infeasible() {
        AidStatus::Infeasible
    } else {
        AidStatus::InvalidInput
    }
}

/// Run `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (AidStatus, String)>) -> AidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            AidStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            AidStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (AidStatus, String) {
    (status_of(&e), format!("{}: {e}", e.kind()))
}

fn null(what: &str) -> (AidStatus, String) {
    (AidStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (AidStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (AidStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

/// Message of the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn aid_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse and validate a prior from JSON.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a valid pointer.
/// On success `*out` owns a handle to be released with [`aid_prior_free`].
#[no_mangle]
pub unsafe extern "C" fn aid_prior_from_json(json: *const c_char, out: *mut *mut AidPrior) -> AidStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let prior = SymmetricPrior::from_json(text).map_err(core_err)?;
        *out = Box::into_raw(Box::new(AidPrior(prior)));
        Ok(())
    })
}

/// Release a prior handle. Null is ignored.
///
/// # Safety
/// `prior` must be null or a handle from [`aid_prior_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aid_prior_free(prior: *mut AidPrior) {
    if !prior.is_null() {
        drop(Box::from_raw(prior));
    }
}

/// Build a structure by constructor name, for example `"full-extraction"`.
///
/// `params_json` is an object with optional keys `K`, `eps`, `alpha`, `t`,
/// `q`, `R` and `B`; null selects the defaults.
///
/// # Safety
/// `prior` must be a live prior handle, `kind` a valid nul-terminated
/// string, `params_json` null or a valid nul-terminated string and `out` a
/// valid pointer. On success `*out` owns a handle to be released with
/// [`aid_structure_free`].
#[no_mangle]
pub unsafe extern "C" fn aid_build(
    prior: *const AidPrior,
    kind: *const c_char,
    params_json: *const c_char,
    out: *mut *mut AidStructure,
) -> AidStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let prior = prior.as_ref().ok_or_else(|| null("prior"))?;
        let kind = read_str(kind, "kind")?;
        let params: BuildParams = if params_json.is_null() {
            BuildParams::default()
        } else {
            serde_json::from_str(read_str(params_json, "params_json")?)
                .map_err(|e| (AidStatus::InvalidInput, format!("params_json: {e}")))?
        };
        let s = build_named(&prior.0, kind, &params).map_err(core_err)?;
        *out = Box::into_raw(Box::new(AidStructure(s)));
        Ok(())
    })
}

/// Parse and validate a structure from JSON.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aid_structure_from_json(json: *const c_char, out: *mut *mut AidStructure) -> AidStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = InfoStructure::from_json(read_str(json, "json")?).map_err(core_err)?;
        *out = Box::into_raw(Box::new(AidStructure(s)));
        Ok(())
    })
}

/// Serialize a structure to JSON.
///
/// # Safety
/// `structure` must be a live handle and `out` a valid pointer. On success
/// `*out` must be released with [`aid_string_free`].
#[no_mangle]
pub unsafe extern "C" fn aid_structure_to_json(structure: *const AidStructure, out: *mut *mut c_char) -> AidStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = structure.as_ref().ok_or_else(|| null("structure"))?;
        *out = to_c_string(s.0.to_json());
        Ok(())
    })
}

/// Release a structure handle. Null is ignored.
///
/// # Safety
/// `structure` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aid_structure_free(structure: *mut AidStructure) {
    if !structure.is_null() {
        drop(Box::from_raw(structure));
    }
}

/// Exact payoffs when every bidder bids its signal atom.
///
/// # Safety
/// `structure` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aid_evaluate(structure: *const AidStructure, out: *mut AidPayoff) -> AidStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = &structure.as_ref().ok_or_else(|| null("structure"))?.0;
        let p = evaluate(s, &StrategyProfile::truthful(s)).map_err(core_err)?;
        *out = AidPayoff {
            revenue: p.revenue,
            bidder_surplus: p.bidder_surplus,
            welfare: p.welfare,
            tie_mass: p.tie_mass,
        };
        Ok(())
    })
}

/// Audit the prescribed strategies with tolerance `tol`; `report_json` may be
/// null, otherwise it receives the full audit as JSON.
///
/// # Safety
/// `structure` must be a live handle, `out` a valid pointer and
/// `report_json` null or a valid pointer. A returned report must be
/// released with [`aid_string_free`].
#[no_mangle]
pub unsafe extern "C" fn aid_verify(
    structure: *const AidStructure,
    tol: f64,
    out: *mut AidVerdict,
    report_json: *mut *mut c_char,
) -> AidStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(tol.is_finite() && tol >= 0.0) {
            return Err((AidStatus::InvalidInput, format!("tol must be finite and non-negative, got {tol}")));
        }
        let s = &structure.as_ref().ok_or_else(|| null("structure"))?.0;
        let r = verify_strict(s, &StrategyProfile::truthful(s), tol);
        *out = AidVerdict {
            is_bne: r.is_bne,
            is_strict: r.is_strict,
            worst_gain: r.worst_gain,
            strict_margin: r.strict_margin,
        };
        if !report_json.is_null() {
            let text = serde_json::to_string(&r).map_err(|e| (AidStatus::InvalidInput, e.to_string()))?;
            *report_json = to_c_string(text);
        }
        Ok(())
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
