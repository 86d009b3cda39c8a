use std::ffi::{CStr, CString};
use std::ptr;

use wpbdd_ffi::*;

const EXAMPLE: &str = r#"{
  "variables": [
    { "name": "a", "values": ["1", "2"] },
    { "name": "b", "values": ["1", "2", "3"] }
  ],
  "cpts": [
    { "child": "a", "parents": [], "table": [0.5, 0.5] },
    { "child": "b", "parents": ["a"], "table": [0.3, 0.3, 0.4, 0.3, 0.3, 0.4] }
  ]
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = wpbdd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn model() -> (*mut WpbddNetwork, *mut WpbddModel) {
    let json = c(EXAMPLE);
    let mut net = ptr::null_mut();
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(wpbdd_network_from_json(json.as_ptr(), &mut net), WpbddStatus::Ok);
        assert_eq!(wpbdd_model_compile(net, true, &mut model), WpbddStatus::Ok);
    }
    (net, model)
}

#[test]
fn compile_and_query() {
    let (net, model) = model();
    unsafe {
        assert_eq!(wpbdd_network_num_variables(net), 2);
        assert_eq!(wpbdd_model_node_count(model), 3);
        assert_eq!(wpbdd_model_operator_count(model), 7);
        let mut p = 0.0;
        let (b, three) = (c("b"), c("3"));
        let st = wpbdd_model_query(model, b.as_ptr(), three.as_ptr(), ptr::null(), ptr::null(), 0, &mut p);
        assert_eq!(st, WpbddStatus::Ok);
        assert!((p - 0.4).abs() < 1e-12);
        assert!(wpbdd_last_error_message().is_null());

        let (a, two, one) = (c("a"), c("2"), c("1"));
        let vars = [b.as_ptr()];
        let vals = [one.as_ptr()];
        let st = wpbdd_model_query(model, a.as_ptr(), two.as_ptr(), vars.as_ptr(), vals.as_ptr(), 1, &mut p);
        assert_eq!(st, WpbddStatus::Ok);
        assert!((p - 0.5).abs() < 1e-12);

        let text = wpbdd_model_serialize(model);
        assert_eq!(
            CStr::from_ptr(text).to_str().unwrap(),
            "2 5 W={3} 1 0\n3 3 +4 W={2} 1 2\n4 1 +2 W={1} 3 0\nroot 4\n"
        );
        wpbdd_string_free(text);
        wpbdd_model_free(model);
        wpbdd_network_free(net);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let (net, model) = model();
    unsafe {
        let mut p = 0.0;
        let (b, nine) = (c("b"), c("9"));
        let st = wpbdd_model_query(model, b.as_ptr(), nine.as_ptr(), ptr::null(), ptr::null(), 0, &mut p);
        assert_eq!(st, WpbddStatus::UnknownAtom);
        assert!(last_error().contains("UnknownAtom"));

        let st = wpbdd_model_query(model, ptr::null(), nine.as_ptr(), ptr::null(), ptr::null(), 0, &mut p);
        assert_eq!(st, WpbddStatus::NullPointer);

        let st = wpbdd_model_query(model, b.as_ptr(), nine.as_ptr(), ptr::null(), ptr::null(), 2, &mut p);
        assert_eq!(st, WpbddStatus::NullPointer);

        let mut other = ptr::null_mut();
        let bad = c(r#"{"variables": [], "cpts": [{"child": "x", "parents": [], "table": [1.0]}]}"#);
        assert_eq!(wpbdd_network_from_json(bad.as_ptr(), &mut other), WpbddStatus::InvalidNetwork);
        assert!(other.is_null());
        assert!(last_error().contains("SchemaError"));

        assert_eq!(wpbdd_model_compile(ptr::null(), true, &mut ptr::null_mut()), WpbddStatus::NullPointer);
        assert!(wpbdd_model_serialize(ptr::null()).is_null());
        assert_eq!(wpbdd_model_node_count(ptr::null()), 0);

        wpbdd_model_free(model);
        wpbdd_network_free(net);
        wpbdd_model_free(ptr::null_mut());
        wpbdd_network_free(ptr::null_mut());
        wpbdd_string_free(ptr::null_mut());
    }
}

#[test]
fn zero_evidence_status() {
    let json = c(r#"{
      "variables": [{"name": "a", "values": ["t", "f"]}, {"name": "b", "values": ["t", "f"]}],
      "cpts": [
        {"child": "a", "parents": [], "table": [1.0, 0.0]},
        {"child": "b", "parents": ["a"], "table": [0.5, 0.5, 0.5, 0.5]}
      ]
    }"#);
    unsafe {
        let mut net = ptr::null_mut();
        let mut model = ptr::null_mut();
        assert_eq!(wpbdd_network_from_json(json.as_ptr(), &mut net), WpbddStatus::Ok);
        assert_eq!(wpbdd_model_compile(net, false, &mut model), WpbddStatus::Ok);
        let (a, f, b, t) = (c("a"), c("f"), c("b"), c("t"));
        let vars = [a.as_ptr()];
        let vals = [f.as_ptr()];
        let mut p = 0.0;
        let st = wpbdd_model_query(model, b.as_ptr(), t.as_ptr(), vars.as_ptr(), vals.as_ptr(), 1, &mut p);
        assert_eq!(st, WpbddStatus::ZeroEvidence);
        assert!(last_error().starts_with("ZeroEvidence"));
        wpbdd_model_free(model);
        wpbdd_network_free(net);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/wpbdd.h")).unwrap();
    for name in [
        "wpbdd_last_error_message",
        "wpbdd_network_from_json",
        "wpbdd_network_free",
        "wpbdd_model_compile",
        "wpbdd_model_query",
        "wpbdd_model_serialize",
        "wpbdd_string_free",
        "typedef struct WpbddModel WpbddModel",
        "WPBDD_STATUS_ZERO_EVIDENCE = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
