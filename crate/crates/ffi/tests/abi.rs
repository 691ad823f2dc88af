use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use emck_ffi::*;

const W1: &str = "states: 1 2 3
sigma: powerset
prior: 1=1/2 2=1/4 3=1/4
agent alice:
  poss: 1 -> {1}; 2 -> {2 3}; 3 -> {2 3}
  type: bayes
event E = {2 3}
";

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    emck_string_free(s);
    out
}

unsafe fn parse(text: &str) -> (EmckStatus, *mut EmckModel, Option<String>) {
    let text = CString::new(text).unwrap();
    let mut model = ptr::null_mut();
    let mut err = ptr::null_mut();
    let status = emck_model_parse(text.as_ptr(), false, &mut model, &mut err);
    let err = (!err.is_null()).then(|| take(err));
    (status, model, err)
}

#[test]
fn parse_serialize_and_free() {
    unsafe {
        let (status, m, err) = parse(W1);
        assert_eq!((status, err), (EmckStatus::Ok, None));
        assert_eq!(emck_model_n_states(m), 3);
        assert_eq!(emck_model_n_agents(m), 1);
        let mut out = ptr::null_mut();
        assert_eq!(emck_model_serialize(m, false, &mut out, ptr::null_mut()), EmckStatus::Ok);
        assert_eq!(take(out), W1);
        emck_model_free(m);
        emck_model_free(ptr::null_mut());
        emck_string_free(ptr::null_mut());
        assert_eq!(emck_model_n_states(ptr::null()), 0);
    }
}

#[test]
fn parse_errors_carry_locations() {
    unsafe {
        let (status, m, err) = parse("states: a b\nprior: a=1/2 b=1/3\n");
        assert_eq!(status, EmckStatus::Parse);
        assert!(m.is_null());
        assert!(err.unwrap().starts_with("2:1: prior weights sum to 5/6"));
        let (status, _, _) = parse("states: a b\nprior: a=1 b=0\nagent i:\n  poss: a -> {a}; b -> {b}\n  type: bayes\n");
        assert_eq!(status, EmckStatus::Invariant);
        let mut m = ptr::null_mut();
        assert_eq!(emck_model_parse(ptr::null(), false, &mut m, ptr::null_mut()), EmckStatus::InvalidArgument);
    }
}

#[test]
fn check_verify_eval() {
    unsafe {
        let (_, m, _) = parse(W1);
        let mut json = ptr::null_mut();
        let regular = CString::new("regular").unwrap();
        assert_eq!(emck_check(m, regular.as_ptr(), ptr::null(), &mut json, ptr::null_mut()), EmckStatus::Ok);
        let j: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(j[0]["agent"], "alice");
        assert_eq!(j[0]["report"]["passed"], true);

        let bogus = CString::new("bogus").unwrap();
        let mut err = ptr::null_mut();
        let status = emck_check(m, bogus.as_ptr(), ptr::null(), &mut json, &mut err);
        assert_eq!(status, EmckStatus::InvalidArgument);
        assert!(take(err).contains("bogus"));

        let claim = CString::new("theorem-main").unwrap();
        assert_eq!(emck_verify(m, claim.as_ptr(), false, &mut json, ptr::null_mut()), EmckStatus::Ok);
        let j: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(j[0]["report"]["verdict"], "holds");
        let claim = CString::new("cor-main").unwrap();
        assert_eq!(emck_verify(m, claim.as_ptr(), false, &mut json, ptr::null_mut()), EmckStatus::Ok);
        take(json);

        let mut bits = 0u64;
        let expr = CString::new("K[alice](E)").unwrap();
        assert_eq!(emck_eval(m, expr.as_ptr(), &mut bits, ptr::null_mut()), EmckStatus::Ok);
        assert_eq!(bits, 0b110);
        let expr = CString::new("B[alice,3/2](E)").unwrap();
        assert_eq!(emck_eval(m, expr.as_ptr(), &mut bits, ptr::null_mut()), EmckStatus::Parse);
        emck_model_free(m);
    }
}

#[test]
fn unmet_hypotheses_map_to_status() {
    unsafe {
        let text = "states: a b\nprior: a=1 b=0\nagent i:\n  poss: a -> {a}; b -> {a b}\n  type: additive\n  a: a=1\n  b: a=1\n";
        let (status, m, err) = parse(text);
        assert_eq!(status, EmckStatus::Ok, "{err:?}");
        let claim = CString::new("cor-main").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(emck_verify(m, claim.as_ptr(), false, &mut json, ptr::null_mut()), EmckStatus::HypothesisNotMet);
        take(json);
        emck_model_free(m);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/emck.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["emck_model_parse", "emck_model_free", "emck_string_free", "emck_check", "emck_verify", "emck_eval"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"emck.h\"\nint main(void) { EmckModel *m = 0; (void)emck_model_n_states(m); return EMCK_STATUS_OK; }\n",
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; header syntax not checked");
        return;
    };
    assert!(status.success());
}
