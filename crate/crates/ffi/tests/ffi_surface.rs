//! Exercises the C surface from Rust: ownership, status codes, error
//! text, and round trips. Everything here goes through the extern fns.

use std::ffi::{CStr, CString};
use std::ptr;

use modalguard_ffi::*;

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes and frees a library-owned string.
unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let text = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    mg_string_free(ptr);
    text
}

unsafe fn last_error() -> Option<String> {
    let ptr = mg_last_error_message();
    if ptr.is_null() {
        None
    } else {
        Some(take_string(ptr))
    }
}

#[test]
fn abi_version_is_published() {
    assert_eq!(mg_abi_version(), MG_ABI_VERSION);
}

#[test]
fn formula_round_trip_through_the_boundary() {
    unsafe {
        let text = cstring("[](a->b)|!<>c");
        let mut formula: *mut MgFormula = ptr::null_mut();
        assert_eq!(mg_formula_parse(text.as_ptr(), &mut formula), MgStatus::MG_OK);
        assert!(!formula.is_null());

        let mut rendered: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(mg_formula_render(formula, &mut rendered), MgStatus::MG_OK);
        assert_eq!(take_string(rendered), "[](a -> b) | !<>c");
        assert_eq!(last_error(), None);
        mg_formula_free(formula);
    }
}

#[test]
fn parse_failure_sets_the_error_and_leaves_out_untouched() {
    unsafe {
        let text = cstring("[](a -> ");
        let mut formula: *mut MgFormula = ptr::null_mut();
        assert_eq!(mg_formula_parse(text.as_ptr(), &mut formula), MgStatus::MG_ERR_PARSE);
        assert!(formula.is_null(), "out must not be written on failure");
        let message = last_error().expect("failure must leave a message");
        assert!(message.contains("offset"), "got: {message}");
    }
}

#[test]
fn null_arguments_are_rejected_not_dereferenced() {
    unsafe {
        let mut formula: *mut MgFormula = ptr::null_mut();
        assert_eq!(
            mg_formula_parse(ptr::null(), &mut formula),
            MgStatus::MG_ERR_INVALID_ARGUMENT
        );
        let text = cstring("a");
        assert_eq!(
            mg_formula_parse(text.as_ptr(), ptr::null_mut()),
            MgStatus::MG_ERR_INVALID_ARGUMENT
        );
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            mg_formula_render(ptr::null(), &mut out),
            MgStatus::MG_ERR_INVALID_ARGUMENT
        );
        let mut holds = false;
        assert_eq!(
            mg_model_eval(ptr::null(), ptr::null(), ptr::null(), &mut holds),
            MgStatus::MG_ERR_INVALID_ARGUMENT
        );
        assert!(last_error().is_some());

        // Frees tolerate NULL.
        mg_formula_free(ptr::null_mut());
        mg_axioms_free(ptr::null_mut());
        mg_model_free(ptr::null_mut());
        mg_string_free(ptr::null_mut());
    }
}

#[test]
fn model_json_round_trips_byte_identically() {
    let canonical = modalguard::agents::initial_model().to_canonical_json();
    unsafe {
        let json = cstring(&canonical);
        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(mg_model_from_json(json.as_ptr(), &mut model), MgStatus::MG_OK);

        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(mg_model_to_json(model, &mut out), MgStatus::MG_OK);
        assert_eq!(take_string(out), canonical);
        mg_model_free(model);
    }
}

#[test]
fn malformed_model_json_is_a_parse_error() {
    unsafe {
        let json = cstring("{\"worlds\": 3}");
        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(
            mg_model_from_json(json.as_ptr(), &mut model),
            MgStatus::MG_ERR_PARSE
        );
        assert!(model.is_null());
    }
}

fn single_world_model() -> CString {
    cstring(
        r#"{"worlds": {"w1": ["klystron_fault_reported", "rf_power_fault_reported"]},
           "accessibility": [["w1", "w1"]],
           "current": "w1",
           "vocabulary": ["cooling_fault_reported", "klystron_fault_reported",
                          "rf_fault_is_root_cause", "rf_power_fault_reported",
                          "vacuum_fault_reported"]}"#,
    )
}

#[test]
fn eval_honors_the_current_world_default_and_rejects_unknown_worlds() {
    unsafe {
        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(
            mg_model_from_json(single_world_model().as_ptr(), &mut model),
            MgStatus::MG_OK
        );
        let mut formula: *mut MgFormula = ptr::null_mut();
        let text = cstring("klystron_fault_reported & rf_power_fault_reported");
        assert_eq!(mg_formula_parse(text.as_ptr(), &mut formula), MgStatus::MG_OK);

        let mut holds = false;
        assert_eq!(
            mg_model_eval(model, ptr::null(), formula, &mut holds),
            MgStatus::MG_OK
        );
        assert!(holds);

        let named = cstring("w1");
        assert_eq!(mg_model_eval(model, named.as_ptr(), formula, &mut holds), MgStatus::MG_OK);
        assert!(holds);

        let missing = cstring("w9");
        assert_eq!(
            mg_model_eval(model, missing.as_ptr(), formula, &mut holds),
            MgStatus::MG_ERR_SEMANTICS
        );
        let message = last_error().unwrap();
        assert!(message.contains("w9"), "got: {message}");

        mg_formula_free(formula);
        mg_model_free(model);
    }
}

#[test]
fn out_of_vocabulary_atoms_are_semantic_errors() {
    unsafe {
        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(
            mg_model_from_json(single_world_model().as_ptr(), &mut model),
            MgStatus::MG_OK
        );
        let mut formula: *mut MgFormula = ptr::null_mut();
        let text = cstring("gremlin_infestation");
        assert_eq!(mg_formula_parse(text.as_ptr(), &mut formula), MgStatus::MG_OK);
        let mut holds = false;
        assert_eq!(
            mg_model_eval(model, ptr::null(), formula, &mut holds),
            MgStatus::MG_ERR_SEMANTICS
        );
        mg_formula_free(formula);
        mg_model_free(model);
    }
}

#[test]
fn builtin_doctrine_checks_clean_on_a_consistent_world() {
    unsafe {
        let mut axioms: *mut MgAxioms = ptr::null_mut();
        assert_eq!(mg_axioms_builtin(&mut axioms), MgStatus::MG_OK);
        assert_eq!(mg_axioms_len(axioms), 3);

        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(
            mg_model_from_json(single_world_model().as_ptr(), &mut model),
            MgStatus::MG_OK
        );

        let mut ok = false;
        let mut report: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            mg_model_check_axioms(model, axioms, &mut ok, &mut report),
            MgStatus::MG_OK
        );
        assert!(ok);
        let report = take_string(report);
        assert!(report.contains("\"ok\":true"), "got: {report}");

        mg_model_free(model);
        mg_axioms_free(axioms);
    }
}

#[test]
fn violations_are_reported_with_axiom_and_world() {
    // Both exclusive faults at a reflexive world: fault_exclusion fails.
    let json = cstring(
        r#"{"worlds": {"w0": ["cooling_fault_reported", "klystron_fault_reported",
                             "rf_power_fault_reported"]},
           "accessibility": [["w0", "w0"]],
           "current": "w0",
           "vocabulary": ["cooling_fault_reported", "klystron_fault_reported",
                          "rf_fault_is_root_cause", "rf_power_fault_reported",
                          "vacuum_fault_reported"]}"#,
    );
    unsafe {
        let mut axioms: *mut MgAxioms = ptr::null_mut();
        assert_eq!(mg_axioms_builtin(&mut axioms), MgStatus::MG_OK);
        let mut model: *mut MgModel = ptr::null_mut();
        assert_eq!(mg_model_from_json(json.as_ptr(), &mut model), MgStatus::MG_OK);

        let mut ok = true;
        let mut report: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            mg_model_check_axioms(model, axioms, &mut ok, &mut report),
            MgStatus::MG_OK
        );
        assert!(!ok);
        let report = take_string(report);
        assert!(report.contains("fault_exclusion"), "got: {report}");
        assert!(report.contains("w0"), "got: {report}");

        mg_model_free(model);
        mg_axioms_free(axioms);
    }
}

#[test]
fn custom_axiom_files_parse_and_count() {
    unsafe {
        let text = cstring("# one law\nonly: [](p -> q)\n");
        let mut axioms: *mut MgAxioms = ptr::null_mut();
        assert_eq!(mg_axioms_parse(text.as_ptr(), &mut axioms), MgStatus::MG_OK);
        assert_eq!(mg_axioms_len(axioms), 1);
        mg_axioms_free(axioms);

        let bad = cstring("broken: [](p -> \n");
        let mut axioms: *mut MgAxioms = ptr::null_mut();
        assert_eq!(mg_axioms_parse(bad.as_ptr(), &mut axioms), MgStatus::MG_ERR_PARSE);
        assert!(axioms.is_null());
        assert!(last_error().unwrap().contains("line"));
    }
}

#[test]
fn scenario_runs_are_deterministic_through_the_boundary() {
    unsafe {
        let id = cstring("direct_klystron");
        let mut first: *mut std::ffi::c_char = ptr::null_mut();
        let mut second: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(mg_run_builtin_scenario(id.as_ptr(), -1, &mut first), MgStatus::MG_OK);
        assert_eq!(mg_run_builtin_scenario(id.as_ptr(), -1, &mut second), MgStatus::MG_OK);
        let first = take_string(first);
        let second = take_string(second);
        assert_eq!(first, second);
        assert!(first.contains("\"klystron_fault_reported\""));

        // A different seed changes the telemetry, not the verdict.
        let mut reseeded: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(mg_run_builtin_scenario(id.as_ptr(), 7, &mut reseeded), MgStatus::MG_OK);
        let reseeded = take_string(reseeded);
        assert_ne!(first, reseeded);
        assert!(reseeded.contains("\"klystron_fault_reported\""));
    }
}

#[test]
fn unknown_scenario_is_an_invalid_argument() {
    unsafe {
        let id = cstring("heisenbug");
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            mg_run_builtin_scenario(id.as_ptr(), -1, &mut out),
            MgStatus::MG_ERR_INVALID_ARGUMENT
        );
        assert!(out.is_null());
        assert!(last_error().unwrap().contains("heisenbug"));
    }
}
