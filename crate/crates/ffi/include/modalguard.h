/* C interface to the modalguard diagnosis engine. Generated by cbindgen; do not edit. */

#ifndef MODALGUARD_H
#define MODALGUARD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Bumped on any break in this header's contract.
#define MG_ABI_VERSION 1

// Status code returned by every fallible entry point.
typedef enum {
  // Success.
  MG_OK = 0,
  // A NULL pointer, non-UTF-8 string, or otherwise unusable argument.
  MG_ERR_INVALID_ARGUMENT = 1,
  // Text failed to parse (formula, axiom file, or model JSON).
  MG_ERR_PARSE = 2,
  // Structurally valid input rejected by the kernel (unknown world,
  // vocabulary violation, malformed model).
  MG_ERR_SEMANTICS = 3,
  // A simulation or diagnosis episode failed to run.
  MG_ERR_RUN = 4,
  // A bug: a panic was caught at the boundary.
  MG_ERR_INTERNAL = 5,
} MgStatus;

// Opaque labeled axiom set.
typedef struct MgAxioms MgAxioms;

// Opaque parsed modal formula.
typedef struct MgFormula MgFormula;

// Opaque Kripke belief model.
typedef struct MgModel MgModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// ABI version of this library; compare against MG_ABI_VERSION.
uint32_t mg_abi_version(void);

// Latest error text for this thread, or NULL if no call failed yet.
// The caller owns the returned string; free it with mg_string_free.
char *mg_last_error_message(void);

// Releases a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void mg_string_free(char *s);

// Parses a modal formula; on MG_OK the caller owns `*out`.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be writable.
MgStatus mg_formula_parse(const char *text, MgFormula **out);

// Renders a formula in canonical minimal-parenthesis form.
//
// # Safety
// `formula` must be a live handle from this library; `out` writable.
MgStatus mg_formula_render(const MgFormula *formula, char **out);

// Releases a formula handle. NULL is a no-op.
//
// # Safety
// `formula` must come from this library and not be freed twice.
void mg_formula_free(MgFormula *formula);

// Parses an axiom file (`label: formula` lines, `#` comments).
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be writable.
MgStatus mg_axioms_parse(const char *text, MgAxioms **out);

// The accelerator-sector doctrine shipped with the library.
//
// # Safety
// `out` must be writable.
MgStatus mg_axioms_builtin(MgAxioms **out);

// Number of axioms in the set; 0 for NULL.
//
// # Safety
// `axioms` must be NULL or a live handle.
size_t mg_axioms_len(const MgAxioms *axioms);

// Releases an axiom-set handle. NULL is a no-op.
//
// # Safety
// `axioms` must come from this library and not be freed twice.
void mg_axioms_free(MgAxioms *axioms);

// Loads a model from its canonical JSON form.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` must be writable.
MgStatus mg_model_from_json(const char *json, MgModel **out);

// Serializes a model to canonical JSON (newline-terminated).
//
// # Safety
// `model` must be a live handle; `out` must be writable.
MgStatus mg_model_to_json(const MgModel *model, char **out);

// Evaluates a formula at a world; `world` NULL means the current world.
//
// # Safety
// Handles must be live; `world` NULL or NUL-terminated; `out` writable.
MgStatus mg_model_eval(const MgModel *model,
                       const char *world,
                       const MgFormula *formula,
                       bool *out);

// Checks every axiom at every world. `*out_ok` reports the verdict; when
// `out_report_json` is non-NULL it receives a JSON report of the shape
// {"ok": bool, "violations": [{"axiom": ..., "world": ...}]}.
//
// # Safety
// Handles must be live; `out_ok` writable; `out_report_json` NULL or
// writable.
MgStatus mg_model_check_axioms(const MgModel *model,
                               const MgAxioms *axioms,
                               bool *out_ok,
                               char **out_report_json);

// Releases a model handle. NULL is a no-op.
//
// # Safety
// `model` must come from this library and not be freed twice.
void mg_model_free(MgModel *model);

// Runs a built-in scenario end to end with the rule generator and
// returns the diagnosis as canonical JSON. `seed` overrides the
// scenario's seed when non-negative.
//
// # Safety
// `id` must be a valid NUL-terminated string; `out` must be writable.
MgStatus mg_run_builtin_scenario(const char *id, int64_t seed, char **out_diagnosis_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODALGUARD_H */
