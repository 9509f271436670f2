//! The fixed belief vocabulary of the accelerator-diagnosis domain.
//!
//! Report-level atoms state what monitors observed; diagnosis-level atoms
//! state what the reasoner concluded. The interpretation table below is the
//! single reviewable place tying the two levels together.

use std::collections::BTreeSet;

use crate::kernel::Proposition;

fn prop(name: &str) -> Proposition {
    Proposition::new(name).expect("static vocabulary names are valid identifiers")
}

// Report-level atoms.
pub fn system_nominal() -> Proposition {
    prop("system_nominal")
}

pub fn cooling_fault_reported() -> Proposition {
    prop("cooling_fault_reported")
}

pub fn klystron_fault_reported() -> Proposition {
    prop("klystron_fault_reported")
}

pub fn rf_power_fault_reported() -> Proposition {
    prop("rf_power_fault_reported")
}

pub fn vacuum_fault_reported() -> Proposition {
    prop("vacuum_fault_reported")
}

pub fn rf_overheat_reported() -> Proposition {
    prop("rf_overheat_reported")
}

// Diagnosis-level atoms.
pub fn rf_fault_is_root_cause() -> Proposition {
    prop("rf_fault_is_root_cause")
}

pub fn cooling_insufficient() -> Proposition {
    prop("cooling_insufficient")
}

pub fn rf_overheats() -> Proposition {
    prop("RF_overheats")
}

pub fn klystron_damaged() -> Proposition {
    prop("klystron_damaged")
}

pub fn rf_power_low() -> Proposition {
    prop("rf_power_low")
}

pub fn vacuum_degraded() -> Proposition {
    prop("vacuum_degraded")
}

/// Every proposition the belief model may mention.
pub fn belief_vocabulary() -> BTreeSet<Proposition> {
    [
        system_nominal(),
        cooling_fault_reported(),
        klystron_fault_reported(),
        rf_power_fault_reported(),
        vacuum_fault_reported(),
        rf_overheat_reported(),
        rf_fault_is_root_cause(),
        cooling_insufficient(),
        rf_overheats(),
        klystron_damaged(),
        rf_power_low(),
        vacuum_degraded(),
    ]
    .into()
}

/// What a committed report-level atom says about the plant, as a
/// diagnosis-level conclusion. Atoms without an entry carry no extra
/// conclusion.
pub fn diagnosis_interpretation(p: &Proposition) -> Option<Proposition> {
    let interpreted = match p.as_str() {
        "cooling_fault_reported" => cooling_insufficient(),
        "rf_overheat_reported" => rf_overheats(),
        "klystron_fault_reported" => klystron_damaged(),
        "rf_power_fault_reported" => rf_power_low(),
        "vacuum_fault_reported" => vacuum_degraded(),
        _ => return None,
    };
    Some(interpreted)
}
