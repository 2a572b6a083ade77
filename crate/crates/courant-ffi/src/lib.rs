//! C ABI over the exact curvature engine. Models live behind opaque handles;
//! every computation returns a status code plus a JSON report string (the
//! same byte-deterministic reports the CLI prints). All returned strings are
//! owned by the caller and must be released with `courant_string_free`.
//!
//! Rationals cross the boundary as strings ("p/q" or a bare integer), never
//! as floating point, so exactness survives the ABI.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use courant_core::algebroid::CourantModel;
use courant_core::driver::{
    ce_report, consequences_report, curvature_report, lc_space_report, sequence_report,
    validate_report, verify_report, ConnChoice,
};
use courant_core::model::{
    build_connection, build_model, export_model, load_model, parse_connection, parse_model,
    FileError,
};
use courant_core::rat::{parse_q, qr, Q};
use courant_core::report::Report;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CourantStatus {
    /// The operation ran and every check in the report passed.
    Ok = 0,
    /// The operation ran and a mathematical check failed, or structurally
    /// well-formed input was rejected on mathematical grounds.
    CheckFailed = 1,
    /// The input could not be parsed at all.
    InvalidInput = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// An internal invariant failed; the library state is still valid.
    InternalError = 4,
}

/// Opaque validated model handle.
pub struct CourantModelHandle {
    inner: CourantModel,
}

fn file_error_status(e: &FileError) -> CourantStatus {
    if e.exit_code() == 1 {
        CourantStatus::CheckFailed
    } else {
        CourantStatus::InvalidInput
    }
}

/// Writes `s` to `*out` as a caller-owned C string. Interior NULs cannot
/// occur in report JSON; map them to InternalError anyway rather than panic.
fn write_string(out: *mut *mut c_char, s: String) -> CourantStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            CourantStatus::Ok
        }
        Err(_) => CourantStatus::InternalError,
    }
}

fn write_report(out: *mut *mut c_char, report: &Report) -> CourantStatus {
    let ok = report.passed();
    match write_string(out, report.render_json()) {
        CourantStatus::Ok if ok => CourantStatus::Ok,
        CourantStatus::Ok => CourantStatus::CheckFailed,
        other => other,
    }
}

fn write_error_report(
    out: *mut *mut c_char,
    command: &str,
    status: CourantStatus,
    message: &str,
) -> CourantStatus {
    let mut report = Report::error(command, "-", message);
    if status == CourantStatus::CheckFailed {
        report.status = "fail".into();
    }
    match write_string(out, report.render_json()) {
        CourantStatus::Ok => status,
        other => other,
    }
}

/// Runs `f` with panics contained; a panic produces InternalError and an
/// error report instead of unwinding across the ABI.
fn guarded(
    out: *mut *mut c_char,
    command: &str,
    f: impl FnOnce(*mut *mut c_char) -> CourantStatus,
) -> CourantStatus {
    if out.is_null() {
        return CourantStatus::NullArgument;
    }
    unsafe { *out = ptr::null_mut() };
    match catch_unwind(AssertUnwindSafe(|| f(out))) {
        Ok(status) => status,
        Err(_) => write_error_report(
            out,
            command,
            CourantStatus::InternalError,
            "internal invariant violated",
        ),
    }
}

unsafe fn model_ref<'a>(model: *const CourantModelHandle) -> Option<&'a CourantModel> {
    model.as_ref().map(|h| &h.inner)
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, CourantStatus> {
    if s.is_null() {
        return Err(CourantStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| CourantStatus::InvalidInput)
}

/// Parses a rational flag; null selects the given default.
unsafe fn q_arg(s: *const c_char, default: Q) -> Result<Q, String> {
    if s.is_null() {
        return Ok(default);
    }
    let text = CStr::from_ptr(s)
        .to_str()
        .map_err(|_| "rational arguments must be UTF-8".to_string())?;
    parse_q(text).ok_or_else(|| format!("'{text}' is not an exact rational"))
}

fn load_into(
    out_model: *mut *mut CourantModelHandle,
    out_report: *mut *mut c_char,
    loaded: Result<CourantModel, FileError>,
) -> CourantStatus {
    match loaded {
        Ok(model) => {
            unsafe {
                *out_model = Box::into_raw(Box::new(CourantModelHandle { inner: model }));
            }
            write_string(out_report, String::new())
        }
        Err(e) => write_error_report(out_report, "load", file_error_status(&e), &e.to_string()),
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn courant_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads and validates a model file. On success `*out_model` owns the handle
/// and `*out_report` is an empty string; on failure `*out_model` stays null
/// and `*out_report` carries an error report.
#[no_mangle]
pub unsafe extern "C" fn courant_model_from_file(
    path: *const c_char,
    out_model: *mut *mut CourantModelHandle,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    if out_model.is_null() {
        return CourantStatus::NullArgument;
    }
    *out_model = ptr::null_mut();
    guarded(out_report, "load", |out| {
        let path = match str_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        load_into(out_model, out, load_model(Path::new(path)))
    })
}

/// Builds a model from JSON text instead of a file.
#[no_mangle]
pub unsafe extern "C" fn courant_model_from_json(
    json: *const c_char,
    out_model: *mut *mut CourantModelHandle,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    if out_model.is_null() {
        return CourantStatus::NullArgument;
    }
    *out_model = ptr::null_mut();
    guarded(out_report, "load", |out| {
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        load_into(out_model, out, parse_model(text).and_then(|f| build_model(&f)))
    })
}

/// Releases a model handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn courant_model_free(model: *mut CourantModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Model name as a caller-owned string, or null if `model` is null.
#[no_mangle]
pub unsafe extern "C" fn courant_model_name(model: *const CourantModelHandle) -> *mut c_char {
    match model_ref(model) {
        None => ptr::null_mut(),
        Some(m) => CString::new(m.name.clone()).map(CString::into_raw).unwrap_or(ptr::null_mut()),
    }
}

/// Canonical JSON serialization of the model, caller-owned.
#[no_mangle]
pub unsafe extern "C" fn courant_model_to_json(model: *const CourantModelHandle) -> *mut c_char {
    match model_ref(model) {
        None => ptr::null_mut(),
        Some(m) => {
            CString::new(export_model(m)).map(CString::into_raw).unwrap_or(ptr::null_mut())
        }
    }
}

/// Base dimension, or -1 if `model` is null.
#[no_mangle]
pub unsafe extern "C" fn courant_model_base_dim(model: *const CourantModelHandle) -> c_int {
    model_ref(model).map_or(-1, |m| m.n() as c_int)
}

/// Fiber dimension (0 without a fiber), or -1 if `model` is null.
#[no_mangle]
pub unsafe extern "C" fn courant_model_fiber_dim(model: *const CourantModelHandle) -> c_int {
    model_ref(model).map_or(-1, |m| m.m() as c_int)
}

/// Frees a string returned by this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn courant_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks the Courant algebroid axioms.
#[no_mangle]
pub unsafe extern "C" fn courant_validate(
    model: *const CourantModelHandle,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "validate", |out| match model_ref(model) {
        None => CourantStatus::NullArgument,
        Some(m) => write_report(out, &validate_report(m)),
    })
}

/// Torsion residuals and curvature blocks of the three-parameter family
/// connection. Rational parameters are strings like "-1/3"; null picks the
/// canonical Levi-Civita value.
#[no_mangle]
pub unsafe extern "C" fn courant_curvature(
    model: *const CourantModelHandle,
    lambda_plus: *const c_char,
    lambda_minus: *const c_char,
    mu: *const c_char,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "curvature", |out| {
        let m = match model_ref(model) {
            None => return CourantStatus::NullArgument,
            Some(m) => m,
        };
        let params = (|| -> Result<(Q, Q, Q), String> {
            Ok((
                q_arg(lambda_plus, qr(-1, 3))?,
                q_arg(lambda_minus, qr(1, 3))?,
                q_arg(mu, qr(1, 3))?,
            ))
        })();
        match params {
            Err(why) => write_error_report(out, "curvature", CourantStatus::InvalidInput, &why),
            Ok((lp, lm, mu)) => write_report(
                out,
                &curvature_report(m, ConnChoice::Family { lp: &lp, lm: &lm, mu: &mu }),
            ),
        }
    })
}

/// Same as `courant_curvature` with the connection given explicitly as the
/// JSON tensor format used by the CLI `--tensors` flag.
#[no_mangle]
pub unsafe extern "C" fn courant_curvature_with_tensors(
    model: *const CourantModelHandle,
    connection_json: *const c_char,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "curvature", |out| {
        let m = match model_ref(model) {
            None => return CourantStatus::NullArgument,
            Some(m) => m,
        };
        let text = match str_arg(connection_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_connection(text).and_then(|f| build_connection(m, &f)) {
            Err(e) => write_error_report(out, "curvature", file_error_status(&e), &e.to_string()),
            Ok(conn) => write_report(out, &curvature_report(m, ConnChoice::Explicit(conn))),
        }
    })
}

/// Cross-checks closed forms against brute-force oracles on seeded random
/// connections.
#[no_mangle]
pub unsafe extern "C" fn courant_verify(
    model: *const CourantModelHandle,
    seed: u64,
    trials: u64,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "verify", |out| match model_ref(model) {
        None => CourantStatus::NullArgument,
        Some(m) => write_report(out, &verify_report(m, seed, trials)),
    })
}

/// Describes the affine space of flat torsion-free connections.
#[no_mangle]
pub unsafe extern "C" fn courant_lc_space(
    model: *const CourantModelHandle,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "lc-space", |out| match model_ref(model) {
        None => CourantStatus::NullArgument,
        Some(m) => write_report(out, &lc_space_report(m)),
    })
}

/// Ranks and exactness of the symmetric-alternating tensor sequence.
#[no_mangle]
pub unsafe extern "C" fn courant_sequence(
    model: *const CourantModelHandle,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "sequence", |out| match model_ref(model) {
        None => CourantStatus::NullArgument,
        Some(m) => write_report(out, &sequence_report(m)),
    })
}

/// Betti numbers of the base algebra cohomology; `max_degree < 0` means the
/// full range.
#[no_mangle]
pub unsafe extern "C" fn courant_ce(
    model: *const CourantModelHandle,
    max_degree: c_int,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "ce", |out| {
        let m = match model_ref(model) {
            None => return CourantStatus::NullArgument,
            Some(m) => m,
        };
        let degree = if max_degree < 0 { None } else { Some(max_degree as usize) };
        match ce_report(m, degree) {
            Ok(report) => write_report(out, &report),
            Err(e) => write_error_report(out, "ce", file_error_status(&e), &e.to_string()),
        }
    })
}

/// Flatness-consequence ledger for a family connection; parameters as in
/// `courant_curvature`.
#[no_mangle]
pub unsafe extern "C" fn courant_consequences(
    model: *const CourantModelHandle,
    lambda_plus: *const c_char,
    lambda_minus: *const c_char,
    mu: *const c_char,
    out_report: *mut *mut c_char,
) -> CourantStatus {
    guarded(out_report, "consequences", |out| {
        let m = match model_ref(model) {
            None => return CourantStatus::NullArgument,
            Some(m) => m,
        };
        let params = (|| -> Result<(Q, Q, Q), String> {
            Ok((
                q_arg(lambda_plus, qr(-1, 3))?,
                q_arg(lambda_minus, qr(1, 3))?,
                q_arg(mu, qr(1, 3))?,
            ))
        })();
        match params {
            Err(why) => write_error_report(out, "consequences", CourantStatus::InvalidInput, &why),
            Ok((lp, lm, mu)) => write_report(out, &consequences_report(m, &lp, &lm, &mu)),
        }
    })
}
