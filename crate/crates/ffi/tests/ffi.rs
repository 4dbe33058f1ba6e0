use std::ffi::{CStr, CString};
use std::ptr;

use aid_core::fixtures;
use aid_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(aid_last_error()) }.to_str().unwrap().to_string()
}

fn p1_handle() -> *mut AidPrior {
    let json = c(&fixtures::p1().to_json());
    let mut prior = ptr::null_mut();
    assert_eq!(unsafe { aid_prior_from_json(json.as_ptr(), &mut prior) }, AidStatus::Ok);
    prior
}

#[test]
fn build_evaluate_verify_round_trip() {
    let prior = p1_handle();
    let kind = c("full-extraction");
    let params = c(r#"{"K": 16, "eps": 0.1}"#);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(aid_build(prior, kind.as_ptr(), params.as_ptr(), &mut s), AidStatus::Ok);
        let mut pay = AidPayoff::default();
        assert_eq!(aid_evaluate(s, &mut pay), AidStatus::Ok);
        assert!((pay.revenue - 0.75).abs() < 1e-12);
        assert!(pay.bidder_surplus.abs() < 1e-12);

        let mut verdict = AidVerdict::default();
        let mut report = ptr::null_mut();
        assert_eq!(aid_verify(s, 1e-9, &mut verdict, &mut report), AidStatus::Ok);
        assert!(verdict.is_bne);
        let text = CStr::from_ptr(report).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["is_bne"], true);
        aid_string_free(report);

        // structure JSON survives a round trip through the ABI
        let mut json = ptr::null_mut();
        assert_eq!(aid_structure_to_json(s, &mut json), AidStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(aid_structure_from_json(json, &mut again), AidStatus::Ok);
        let mut json2 = ptr::null_mut();
        assert_eq!(aid_structure_to_json(again, &mut json2), AidStatus::Ok);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(json2));
        aid_string_free(json);
        aid_string_free(json2);
        aid_structure_free(again);
        aid_structure_free(s);
        aid_prior_free(prior);
    }
}

#[test]
fn null_params_use_defaults() {
    let prior = p1_handle();
    let kind = c("point-a");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(aid_build(prior, kind.as_ptr(), ptr::null(), &mut s), AidStatus::Ok);
        let mut pay = AidPayoff::default();
        assert_eq!(aid_evaluate(s, &mut pay), AidStatus::Ok);
        assert!((pay.bidder_surplus - 0.75).abs() < 1e-12);
        aid_structure_free(s);
        aid_prior_free(prior);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut prior = ptr::null_mut();
        assert_eq!(aid_prior_from_json(ptr::null(), &mut prior), AidStatus::NullPointer);
        assert!(last_error().contains("json"));

        let bad = c(r#"{"n": 2, "values": [0.0, 1.0], "pmf": [{"profile": [0, 1], "p": 1.0}]}"#);
        assert_eq!(aid_prior_from_json(bad.as_ptr(), &mut prior), AidStatus::InvalidInput);
        assert!(prior.is_null());
        assert!(!last_error().is_empty());

        let invalid_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(aid_prior_from_json(invalid_utf8.as_ptr().cast(), &mut prior), AidStatus::InvalidUtf8);

        let p = p1_handle();
        assert!(last_error().is_empty());
        let mut s = ptr::null_mut();
        let unknown = c("no-such-kind");
        assert_eq!(aid_build(p, unknown.as_ptr(), ptr::null(), &mut s), AidStatus::InvalidInput);
        assert!(last_error().contains("unknown kind"));

        let outside = c("target-payoff");
        let params = c(r#"{"R": 0.1, "B": 0.1}"#);
        assert_eq!(aid_build(p, outside.as_ptr(), params.as_ptr(), &mut s), AidStatus::InvalidInput);

        let bad_params = c("{not json");
        let kind = c("point-a");
        assert_eq!(aid_build(p, kind.as_ptr(), bad_params.as_ptr(), &mut s), AidStatus::InvalidInput);

        assert_eq!(aid_evaluate(ptr::null(), &mut AidPayoff::default()), AidStatus::NullPointer);
        aid_prior_free(p);
        aid_prior_free(ptr::null_mut());
        aid_structure_free(ptr::null_mut());
        aid_string_free(ptr::null_mut());
    }
}

#[test]
fn infeasible_constructor_maps_to_infeasible() {
    // a signal gap this wide leaves no room below the winner's value
    let prior = p1_handle();
    let kind = c("frontier-alpha");
    let params = c(r#"{"alpha": 0.25, "eps": 0.9}"#);
    unsafe {
        let mut s = ptr::null_mut();
        let status = aid_build(prior, kind.as_ptr(), params.as_ptr(), &mut s);
        assert_eq!(status, AidStatus::Infeasible, "{}", last_error());
        assert!(last_error().starts_with("NoFeasibleSignalGap"));
        assert!(s.is_null());
        aid_prior_free(prior);
    }
}

#[test]
fn generated_header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/aid.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in
        ["aid_prior_from_json", "aid_build", "aid_evaluate", "aid_verify", "aid_last_error", "AID_STATUS_INFEASIBLE"]
    {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let status =
        std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).status();
    if let Ok(status) = status {
        assert!(status.success(), "header does not compile");
    }
}
