//! C ABI over `emck`.
//!
//! Models are opaque `EmckModel` handles released with `emck_model_free`.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with `emck_string_free`. Every entry point returns an
//! `EmckStatus`; on failure the optional `error` out-parameter receives a
//! message. Panics never cross the boundary.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use emck::axioms::run_check;
use emck::cli::{exit_for, verify_claim};
use emck::dslio::{eval_expr, parse_expr, parse_model, serialize_doc, ModelDoc, ParseOptions, SerializeOptions};
use emck::multiagent::DEFAULT_AGREEMENT_BUDGET;
use emck::report::VerificationReport;
use serde_json::json;

/// Status codes; the values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmckStatus {
    Ok = 0,
    /// A check failed or a claim was falsified.
    Failed = 1,
    Parse = 2,
    Invariant = 3,
    HypothesisNotMet = 4,
    /// An argument the library cannot use.
    InvalidArgument = 64,
    /// An internal panic was caught.
    Internal = 70,
}

/// A parsed model document.
pub struct EmckModel {
    doc: ModelDoc,
}

struct Failure(EmckStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EmckStatus::InvalidArgument, msg.into())
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn model_arg<'a>(m: *const EmckModel) -> FfiResult<&'a EmckModel> {
    m.as_ref().ok_or_else(|| invalid("model handle is null"))
}

/// Runs `f`, storing any error message in `error` when it is non-null.
unsafe fn guard(error: *mut *mut c_char, f: impl FnOnce() -> FfiResult<EmckStatus>) -> EmckStatus {
    if !error.is_null() {
        *error = ptr::null_mut();
    }
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => return s,
        Ok(Err(Failure(s, m))) => (s, m),
        Err(_) => (EmckStatus::Internal, "internal error".to_string()),
    };
    if !error.is_null() {
        *error = into_c(msg);
    }
    status
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = into_c(s);
    Ok(())
}

/// Parses `.emod` text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable; `error`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn emck_model_parse(
    text: *const c_char,
    allow_null_cells: bool,
    out: *mut *mut EmckModel,
    error: *mut *mut c_char,
) -> EmckStatus {
    guard(error, || {
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let opts = ParseOptions {
            allow_null_cells,
            ..Default::default()
        };
        match parse_model(text, opts) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(EmckModel { doc }));
                Ok(EmckStatus::Ok)
            }
            Err(e) => {
                let status = if e.is_invariant() { EmckStatus::Invariant } else { EmckStatus::Parse };
                Err(Failure(status, e.to_string()))
            }
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must come from `emck_model_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn emck_model_free(model: *mut EmckModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn emck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn emck_model_n_states(model: *const EmckModel) -> u32 {
    model.as_ref().map_or(0, |m| m.doc.model.n_states() as u32)
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn emck_model_n_agents(model: *const EmckModel) -> u32 {
    model.as_ref().map_or(0, |m| m.doc.model.n_agents() as u32)
}

/// Canonical `.emod` text.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable; `error` may be null.
#[no_mangle]
pub unsafe extern "C" fn emck_model_serialize(
    model: *const EmckModel,
    expand_types: bool,
    out: *mut *mut c_char,
    error: *mut *mut c_char,
) -> EmckStatus {
    guard(error, || {
        let m = model_arg(model)?;
        put_string(out, serialize_doc(&m.doc, SerializeOptions { expand_types }))?;
        Ok(EmckStatus::Ok)
    })
}

/// Runs one named checker for one agent (null `agent` means every agent).
/// Writes a JSON array of reports to `*report_json`.
///
/// # Safety
/// Pointers must be valid as documented; `agent` and `error` may be null.
#[no_mangle]
pub unsafe extern "C" fn emck_check(
    model: *const EmckModel,
    axiom: *const c_char,
    agent: *const c_char,
    report_json: *mut *mut c_char,
    error: *mut *mut c_char,
) -> EmckStatus {
    guard(error, || {
        let im = &model_arg(model)?.doc.model;
        let axiom = str_arg(axiom, "axiom")?;
        let agents: Vec<usize> = if agent.is_null() {
            (0..im.n_agents()).collect()
        } else {
            let name = str_arg(agent, "agent")?;
            vec![im.agent_index(name).ok_or_else(|| invalid(format!("unknown agent `{name}`")))?]
        };
        let mut reports = Vec::new();
        for i in agents {
            let a = im.agent(i);
            let r = run_check(axiom, a.model()).ok_or_else(|| invalid(format!("unknown axiom `{axiom}`")))?;
            reports.push(json!({ "agent": a.name(), "report": r }));
        }
        let passed = reports.iter().all(|r| r["report"]["passed"] == true);
        put_string(report_json, serde_json::Value::from(reports).to_string())?;
        Ok(if passed { EmckStatus::Ok } else { EmckStatus::Failed })
    })
}

/// Verifies a claim; writes a JSON array of `{agent, report}` objects.
///
/// # Safety
/// Pointers must be valid as documented; `error` may be null.
#[no_mangle]
pub unsafe extern "C" fn emck_verify(
    model: *const EmckModel,
    claim: *const c_char,
    diagnostic: bool,
    report_json: *mut *mut c_char,
    error: *mut *mut c_char,
) -> EmckStatus {
    guard(error, || {
        let im = &model_arg(model)?.doc.model;
        let claim = str_arg(claim, "claim")?;
        let labelled = verify_claim(im, claim, diagnostic, DEFAULT_AGREEMENT_BUDGET).map_err(|e| match e {
            emck::Error::InvalidParameter(m) | emck::Error::ResourceLimit(m) => invalid(m),
            other => Failure(EmckStatus::Invariant, other.to_string()),
        })?;
        let reports: Vec<VerificationReport> = labelled.iter().map(|(_, r)| r.clone()).collect();
        let j: Vec<_> = labelled.iter().map(|(a, r)| json!({ "agent": a, "report": r })).collect();
        put_string(report_json, serde_json::Value::from(j).to_string())?;
        Ok(match exit_for(&reports) {
            0 => EmckStatus::Ok,
            1 => EmckStatus::Failed,
            _ => EmckStatus::HypothesisNotMet,
        })
    })
}

/// Evaluates an operator expression. The result is a bitmask over states in
/// declaration order (bit `i` is state `i`).
///
/// # Safety
/// Pointers must be valid as documented; `error` may be null.
#[no_mangle]
pub unsafe extern "C" fn emck_eval(
    model: *const EmckModel,
    expr: *const c_char,
    out_bits: *mut u64,
    error: *mut *mut c_char,
) -> EmckStatus {
    guard(error, || {
        let doc = &model_arg(model)?.doc;
        let text = str_arg(expr, "expr")?;
        if out_bits.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let e = parse_expr(doc, text).map_err(|e| {
            let status = if e.is_invariant() { EmckStatus::Invariant } else { EmckStatus::Parse };
            Failure(status, e.to_string())
        })?;
        *out_bits = eval_expr(&doc.model, &e).bits();
        Ok(EmckStatus::Ok)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nul_bytes_do_not_truncate_messages() {
        let p = into_c("a\0b".to_string());
        let s = unsafe { CString::from_raw(p) };
        assert_eq!(s.to_str().unwrap(), "a b");
    }
}
