//! C ABI over the diagnosis engine.
//!
//! Conventions, kept deliberately boring:
//! - Handles (`MgFormula`, `MgAxioms`, `MgModel`) are opaque; create them
//!   through this API and release them with the matching `_free`.
//! - Every fallible call returns an `MgStatus`; `MG_OK` is zero. On any
//!   failure the thread-local error text is updated and can be fetched
//!   with `mg_last_error_message`.
//! - Strings returned through out-parameters are NUL-terminated UTF-8
//!   owned by the caller; release them with `mg_string_free`.
//! - NULL is never a valid handle or out-parameter unless a function
//!   documents it. Passing NULL yields `MG_ERR_INVALID_ARGUMENT`, not UB.
//! - Panics never cross the boundary; they surface as `MG_ERR_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use modalguard::agents::{builtin_axioms, run_episode, EpisodeConfig};
use modalguard::hypothesis::RuleGenerator;
use modalguard::kernel::{AxiomSet, Formula, KripkeModel, WorldId};
use modalguard::sim::builtin_scenario;
use modalguard::syntax::{parse, render, AxiomFile};

/// Bumped on any break in this header's contract.
pub const MG_ABI_VERSION: u32 = 1;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum MgStatus {
    /// Success.
    MG_OK = 0,
    /// A NULL pointer, non-UTF-8 string, or otherwise unusable argument.
    MG_ERR_INVALID_ARGUMENT = 1,
    /// Text failed to parse (formula, axiom file, or model JSON).
    MG_ERR_PARSE = 2,
    /// Structurally valid input rejected by the kernel (unknown world,
    /// vocabulary violation, malformed model).
    MG_ERR_SEMANTICS = 3,
    /// A simulation or diagnosis episode failed to run.
    MG_ERR_RUN = 4,
    /// A bug: a panic was caught at the boundary.
    MG_ERR_INTERNAL = 5,
}

use MgStatus::*;

/// Opaque parsed modal formula.
pub struct MgFormula(Formula);

/// Opaque labeled axiom set.
pub struct MgAxioms(AxiomSet);

/// Opaque Kripke belief model.
pub struct MgModel(KripkeModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(text).expect("NULs stripped"));
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NULs stripped")
        .into_raw()
}

/// Runs a body under catch_unwind so panics become MG_ERR_INTERNAL.
fn guarded(body: impl FnOnce() -> MgStatus) -> MgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".to_string());
            set_error(format!("internal panic: {detail}"));
            MG_ERR_INTERNAL
        }
    }
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MgStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is NULL"));
        return Err(MG_ERR_INVALID_ARGUMENT);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        MG_ERR_INVALID_ARGUMENT
    })
}

unsafe fn ref_arg<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, MgStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is NULL"));
        return Err(MG_ERR_INVALID_ARGUMENT);
    }
    Ok(unsafe { &*ptr })
}

fn out_arg<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, MgStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is NULL"));
        return Err(MG_ERR_INVALID_ARGUMENT);
    }
    Ok(unsafe { &mut *ptr })
}

/// ABI version of this library; compare against MG_ABI_VERSION.
#[no_mangle]
pub extern "C" fn mg_abi_version() -> u32 {
    MG_ABI_VERSION
}

/// Latest error text for this thread, or NULL if no call failed yet.
/// The caller owns the returned string; free it with mg_string_free.
#[no_mangle]
pub extern "C" fn mg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(text) => text.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a modal formula; on MG_OK the caller owns `*out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_formula_parse(
    text: *const c_char,
    out: *mut *mut MgFormula,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let text = match unsafe { str_arg(text, "text") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        match parse(text) {
            Ok(f) => {
                clear_error();
                *out = Box::into_raw(Box::new(MgFormula(f)));
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_PARSE
            }
        }
    })
}

/// Renders a formula in canonical minimal-parenthesis form.
///
/// # Safety
/// `formula` must be a live handle from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mg_formula_render(
    formula: *const MgFormula,
    out: *mut *mut c_char,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let formula = match unsafe { ref_arg(formula, "formula") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        clear_error();
        *out = export_string(render(&formula.0));
        MG_OK
    })
}

/// Releases a formula handle. NULL is a no-op.
///
/// # Safety
/// `formula` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mg_formula_free(formula: *mut MgFormula) {
    if !formula.is_null() {
        drop(unsafe { Box::from_raw(formula) });
    }
}

/// Parses an axiom file (`label: formula` lines, `#` comments).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_axioms_parse(
    text: *const c_char,
    out: *mut *mut MgAxioms,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let text = match unsafe { str_arg(text, "text") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        match AxiomFile::parse(text) {
            Ok(file) => {
                clear_error();
                *out = Box::into_raw(Box::new(MgAxioms(file.into_axiom_set())));
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_PARSE
            }
        }
    })
}

/// The accelerator-sector doctrine shipped with the library.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_axioms_builtin(out: *mut *mut MgAxioms) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        clear_error();
        *out = Box::into_raw(Box::new(MgAxioms(builtin_axioms())));
        MG_OK
    })
}

/// Number of axioms in the set; 0 for NULL.
///
/// # Safety
/// `axioms` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mg_axioms_len(axioms: *const MgAxioms) -> usize {
    if axioms.is_null() {
        0
    } else {
        unsafe { &*axioms }.0.len()
    }
}

/// Releases an axiom-set handle. NULL is a no-op.
///
/// # Safety
/// `axioms` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mg_axioms_free(axioms: *mut MgAxioms) {
    if !axioms.is_null() {
        drop(unsafe { Box::from_raw(axioms) });
    }
}

/// Loads a model from its canonical JSON form.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_model_from_json(
    json: *const c_char,
    out: *mut *mut MgModel,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let json = match unsafe { str_arg(json, "json") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        match KripkeModel::from_json(json) {
            Ok(m) => {
                clear_error();
                *out = Box::into_raw(Box::new(MgModel(m)));
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_PARSE
            }
        }
    })
}

/// Serializes a model to canonical JSON (newline-terminated).
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_model_to_json(
    model: *const MgModel,
    out: *mut *mut c_char,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let model = match unsafe { ref_arg(model, "model") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        clear_error();
        *out = export_string(model.0.to_canonical_json());
        MG_OK
    })
}

/// Evaluates a formula at a world; `world` NULL means the current world.
///
/// # Safety
/// Handles must be live; `world` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mg_model_eval(
    model: *const MgModel,
    world: *const c_char,
    formula: *const MgFormula,
    out: *mut bool,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let model = match unsafe { ref_arg(model, "model") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        let formula = match unsafe { ref_arg(formula, "formula") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        let world_id = if world.is_null() {
            model.0.current().clone()
        } else {
            let text = match unsafe { str_arg(world, "world") } {
                Ok(v) => v,
                Err(s) => return s,
            };
            match WorldId::new(text) {
                Ok(w) => w,
                Err(e) => {
                    set_error(e.to_string());
                    return MG_ERR_SEMANTICS;
                }
            }
        };
        match model.0.eval_at(&world_id, &formula.0) {
            Ok(v) => {
                clear_error();
                *out = v;
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_SEMANTICS
            }
        }
    })
}

/// Checks every axiom at every world. `*out_ok` reports the verdict; when
/// `out_report_json` is non-NULL it receives a JSON report of the shape
/// {"ok": bool, "violations": [{"axiom": ..., "world": ...}]}.
///
/// # Safety
/// Handles must be live; `out_ok` writable; `out_report_json` NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mg_model_check_axioms(
    model: *const MgModel,
    axioms: *const MgAxioms,
    out_ok: *mut bool,
    out_report_json: *mut *mut c_char,
) -> MgStatus {
    guarded(|| {
        let out_ok = match out_arg(out_ok, "out_ok") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let model = match unsafe { ref_arg(model, "model") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        let axioms = match unsafe { ref_arg(axioms, "axioms") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        match model.0.check_axioms(&axioms.0) {
            Ok(result) => {
                clear_error();
                *out_ok = result.ok();
                if !out_report_json.is_null() {
                    let report = serde_json::json!({
                        "ok": result.ok(),
                        "violations": result.violations(),
                    });
                    unsafe {
                        *out_report_json = export_string(report.to_string());
                    }
                }
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_SEMANTICS
            }
        }
    })
}

/// Releases a model handle. NULL is a no-op.
///
/// # Safety
/// `model` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mg_model_free(model: *mut MgModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Runs a built-in scenario end to end with the rule generator and
/// returns the diagnosis as canonical JSON. `seed` overrides the
/// scenario's seed when non-negative.
///
/// # Safety
/// `id` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_run_builtin_scenario(
    id: *const c_char,
    seed: i64,
    out_diagnosis_json: *mut *mut c_char,
) -> MgStatus {
    guarded(|| {
        let out = match out_arg(out_diagnosis_json, "out_diagnosis_json") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let id = match unsafe { str_arg(id, "id") } {
            Ok(v) => v,
            Err(s) => return s,
        };
        let mut spec = match builtin_scenario(id) {
            Ok(s) => s,
            Err(e) => {
                set_error(e.to_string());
                return MG_ERR_INVALID_ARGUMENT;
            }
        };
        if seed >= 0 {
            spec.seed = seed as u64;
        }
        let mut generator = RuleGenerator;
        match run_episode(&spec, EpisodeConfig::sector(&mut generator)) {
            Ok(outcome) => {
                clear_error();
                *out = export_string(outcome.diagnosis.to_canonical_json());
                MG_OK
            }
            Err(e) => {
                set_error(e.to_string());
                MG_ERR_RUN
            }
        }
    })
}
