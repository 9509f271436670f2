/* Minimal consumer: parse a formula, load a belief model, evaluate,
 * check the shipped doctrine, and run a scenario end to end.
 *
 * Build (from the repository root, after `cargo build`):
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      -Ltarget/debug -lmodalguard_ffi -Wl,-rpath,$PWD/target/debug -o demo
 */

#include <modalguard.h>
#include <stdio.h>
#include <string.h>

static int fail(const char *where) {
    char *msg = mg_last_error_message();
    fprintf(stderr, "%s failed: %s\n", where, msg ? msg : "(no message)");
    mg_string_free(msg);
    return 1;
}

int main(void) {
    printf("abi version: %u\n", mg_abi_version());

    MgFormula *direction = NULL;
    if (mg_formula_parse("[](klystron_fault_reported->rf_power_fault_reported)",
                         &direction) != MG_OK)
        return fail("mg_formula_parse");
    char *canon = NULL;
    if (mg_formula_render(direction, &canon) != MG_OK)
        return fail("mg_formula_render");
    printf("canonical form: %s\n", canon);
    mg_string_free(canon);

    /* One committed world; the vocabulary covers the whole doctrine. */
    const char *model_json =
        "{\"worlds\": {\"w1\": [\"klystron_fault_reported\","
        " \"rf_power_fault_reported\", \"rf_fault_is_root_cause\"]},"
        " \"accessibility\": [[\"w1\", \"w1\"]],"
        " \"current\": \"w1\","
        " \"vocabulary\": [\"cooling_fault_reported\","
        " \"klystron_fault_reported\", \"rf_fault_is_root_cause\","
        " \"rf_power_fault_reported\", \"vacuum_fault_reported\"]}";
    MgModel *model = NULL;
    if (mg_model_from_json(model_json, &model) != MG_OK)
        return fail("mg_model_from_json");

    bool holds = false;
    if (mg_model_eval(model, NULL, direction, &holds) != MG_OK)
        return fail("mg_model_eval");
    printf("direction axiom at the current world: %s\n", holds ? "true" : "false");

    MgAxioms *doctrine = NULL;
    if (mg_axioms_builtin(&doctrine) != MG_OK)
        return fail("mg_axioms_builtin");
    printf("doctrine size: %zu\n", mg_axioms_len(doctrine));

    bool ok = false;
    char *report = NULL;
    if (mg_model_check_axioms(model, doctrine, &ok, &report) != MG_OK)
        return fail("mg_model_check_axioms");
    printf("doctrine verdict: %s\n", ok ? "satisfied" : "violated");
    mg_string_free(report);

    char *diagnosis = NULL;
    if (mg_run_builtin_scenario("direct_klystron", -1, &diagnosis) != MG_OK)
        return fail("mg_run_builtin_scenario");
    printf("diagnosis names the klystron: %s\n",
           strstr(diagnosis, "\"klystron_fault_reported\"") ? "yes" : "no");
    mg_string_free(diagnosis);

    mg_axioms_free(doctrine);
    mg_model_free(model);
    mg_formula_free(direction);
    puts("demo complete");
    return 0;
}
