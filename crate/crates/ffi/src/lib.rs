//! C ABI over the `wpbdd` crate.
//!
//! Networks and compiled models are opaque handles created by this library
//! and released with the matching `_free` function. Every fallible call
//! returns a [`WpbddStatus`]; on failure the message is available from
//! [`wpbdd_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wpbdd::error::{Error, InferError};
use wpbdd::{CompileOptions, Model, Network};

/// Opaque network handle.
pub struct WpbddNetwork(Network);

/// Opaque compiled model handle.
pub struct WpbddModel(Model);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpbddStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidNetwork = 3,
    UnknownAtom = 4,
    ZeroEvidence = 5,
    InvalidEvidence = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: WpbddStatus, msg: impl Into<String>) -> WpbddStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> WpbddStatus {
    match err {
        Error::Model(_) => WpbddStatus::InvalidNetwork,
        Error::Encode(_) => WpbddStatus::UnknownAtom,
        Error::Infer(InferError::UnknownAtom(_)) => WpbddStatus::UnknownAtom,
        Error::Infer(InferError::ZeroEvidence(_)) => WpbddStatus::ZeroEvidence,
        Error::Infer(InferError::InvalidEvidence(_)) => WpbddStatus::InvalidEvidence,
        _ => WpbddStatus::Internal,
    }
}

fn guarded<F>(f: F) -> WpbddStatus
where
    F: FnOnce() -> Result<(), WpbddStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WpbddStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(WpbddStatus::Internal, "panic inside wpbdd"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WpbddStatus> {
    if p.is_null() {
        return Err(fail(WpbddStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(WpbddStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn lift<T>(r: Result<T, impl Into<Error>>) -> Result<T, WpbddStatus> {
    r.map_err(|e| {
        let e = e.into();
        fail(status_of(&e), e.to_string())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wpbdd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse a network from a NUL-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_network_from_json(json: *const c_char, out: *mut *mut WpbddNetwork) -> WpbddStatus {
    guarded(|| {
        if out.is_null() {
            return Err(fail(WpbddStatus::NullPointer, "out is null"));
        }
        let text = str_arg(json, "json")?;
        let net = lift(wpbdd::load_network(text.as_bytes()))?;
        *out = Box::into_raw(Box::new(WpbddNetwork(net)));
        Ok(())
    })
}

/// # Safety
/// `net` must come from [`wpbdd_network_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_network_free(net: *mut WpbddNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of variables in the network.
///
/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_network_num_variables(net: *const WpbddNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.num_variables())
}

/// Compile a network. `collapse` selects the collapse reduction.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_compile(
    net: *const WpbddNetwork,
    collapse: bool,
    out: *mut *mut WpbddModel,
) -> WpbddStatus {
    guarded(|| {
        let net = net
            .as_ref()
            .ok_or_else(|| fail(WpbddStatus::NullPointer, "network is null"))?;
        if out.is_null() {
            return Err(fail(WpbddStatus::NullPointer, "out is null"));
        }
        let opts = CompileOptions {
            collapse,
            ..CompileOptions::default()
        };
        let model = lift(Model::build(&net.0, opts))?;
        *out = Box::into_raw(Box::new(WpbddModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`wpbdd_model_compile`] or be null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_free(model: *mut WpbddModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Diagram node count, 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_node_count(model: *const WpbddModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.compiled.node_count())
}

/// Arithmetic circuit operator count, 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_operator_count(model: *const WpbddModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.circuit.operator_count())
}

/// `P(target_var = target_value | evidence)`. Evidence is given as
/// `n_evidence` parallel variable/value name arrays (may be null when
/// `n_evidence` is 0).
///
/// # Safety
/// All strings must be valid C strings; arrays must hold `n_evidence`
/// entries; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_query(
    model: *const WpbddModel,
    target_var: *const c_char,
    target_value: *const c_char,
    evidence_vars: *const *const c_char,
    evidence_values: *const *const c_char,
    n_evidence: usize,
    out: *mut f64,
) -> WpbddStatus {
    guarded(|| {
        let m = &model
            .as_ref()
            .ok_or_else(|| fail(WpbddStatus::NullPointer, "model is null"))?
            .0;
        if out.is_null() {
            return Err(fail(WpbddStatus::NullPointer, "out is null"));
        }
        if n_evidence > 0 && (evidence_vars.is_null() || evidence_values.is_null()) {
            return Err(fail(WpbddStatus::NullPointer, "evidence arrays are null"));
        }
        let th = m.theory();
        let target = lift(th.atom_of(str_arg(target_var, "target_var")?, str_arg(target_value, "target_value")?))?;
        let mut evidence = Vec::with_capacity(n_evidence);
        for i in 0..n_evidence {
            let v = str_arg(*evidence_vars.add(i), "evidence variable")?;
            let x = str_arg(*evidence_values.add(i), "evidence value")?;
            evidence.push(lift(th.atom_of(v, x))?);
        }
        *out = lift(m.query(target, &evidence))?;
        Ok(())
    })
}

/// Canonical text form of the compiled diagram. Release with
/// [`wpbdd_string_free`]. Null on failure.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_model_serialize(model: *const WpbddModel) -> *mut c_char {
    match model.as_ref() {
        Some(m) => CString::new(m.0.compiled.serialize()).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("model is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wpbdd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
