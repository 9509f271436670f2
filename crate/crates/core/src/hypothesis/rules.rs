//! The deterministic rule backend: a reviewable classification table and a
//! causal-precedence table, both pure functions of their inputs.

use std::collections::BTreeSet;

use crate::agents::{FaultReport, TopologyGraph};
use crate::kernel::Proposition;
use crate::vocab;

use super::{
    AnomalyContext, CausalTheory, Classification, Direction, HypothesisError,
    HypothesisGenerator, Source, SystemClass,
};

/// Attribute one anomaly to a subsystem.
///
/// The table is intentionally small and closed: an unknown PV is an
/// explicit error, never a silent default. A hot cavity points at Cooling
/// because the cavity cannot overheat while its heat removal works.
pub fn rule_classify(ctx: &AnomalyContext) -> Result<SystemClass, HypothesisError> {
    match (ctx.pv.subsystem(), ctx.pv.signal(), ctx.direction) {
        ("COOL", _, _) => Ok(SystemClass::Cooling),
        ("RF", "klystron_output", _) => Ok(SystemClass::Klystron),
        ("RF", "forward_power", _) => Ok(SystemClass::Power),
        ("RF", "cavity_temp", Direction::Above) => Ok(SystemClass::Cooling),
        ("VAC", "pressure", _) => Ok(SystemClass::Vacuum),
        _ => Err(HypothesisError::Unclassifiable {
            pv: ctx.pv.to_string(),
            direction: ctx.direction,
        }),
    }
}

/// The symptom a report contributes to theory building.
///
/// A hot cavity is classified as a Cooling problem (and so carries the
/// cooling proposition), but as a symptom it is the RF overheat itself:
/// the observation to explain, not the suspected origin.
pub fn symptom(report: &FaultReport) -> Proposition {
    if report.pv().as_str() == "RF:cavity_temp"
        && report.classification().suspected_system == SystemClass::Cooling
    {
        vocab::rf_overheat_reported()
    } else {
        report.proposition().clone()
    }
}

/// Synthesize fault reports into a single causal theory.
///
/// Precedence encodes the sector's causal doctrine:
/// 1. klystron + power symptoms: the klystron drives forward power, so it
///    is the root and the power sag the effect, never the reverse;
/// 2. cooling + RF-overheat symptoms from distinct agents: degraded
///    cooling is the root, the overheat its downstream effect;
/// 3. otherwise the earliest report stands alone as its own root, except
///    that a vacuum report never outranks a concurrent non-vacuum one.
pub fn rule_theorize(reports: &[FaultReport]) -> Result<CausalTheory, HypothesisError> {
    if reports.is_empty() {
        return Err(HypothesisError::NoReports);
    }
    let symptoms: BTreeSet<Proposition> = reports.iter().map(symptom).collect();

    if symptoms.contains(&vocab::klystron_fault_reported())
        && symptoms.contains(&vocab::rf_power_fault_reported())
    {
        return CausalTheory::new(
            vocab::klystron_fault_reported(),
            vec![vocab::rf_power_fault_reported()],
            "Klystron underperformance drives the forward-power sag; one fault explains both reports.",
        );
    }

    let cooling_agents: BTreeSet<&str> = reports
        .iter()
        .filter(|r| symptom(r) == vocab::cooling_fault_reported())
        .map(|r| r.agent())
        .collect();
    let overheat_agents: BTreeSet<&str> = reports
        .iter()
        .filter(|r| symptom(r) == vocab::rf_overheat_reported())
        .map(|r| r.agent())
        .collect();
    let distinct_pair = cooling_agents
        .iter()
        .any(|c| overheat_agents.iter().any(|o| o != c));
    if distinct_pair {
        return CausalTheory::new(
            vocab::cooling_fault_reported(),
            vec![vocab::rf_overheat_reported()],
            "Degraded cooling starves the cavity of heat removal; the temperature rise is its downstream effect.",
        );
    }

    let mut ordered: Vec<&FaultReport> = reports.iter().collect();
    ordered.sort_by(|a, b| {
        (a.tick(), a.agent(), a.pv().as_str()).cmp(&(b.tick(), b.agent(), b.pv().as_str()))
    });
    let chosen = ordered
        .iter()
        .find(|r| symptom(r) != vocab::vacuum_fault_reported())
        .or_else(|| ordered.first())
        .expect("reports checked non-empty");
    let root = symptom(chosen);
    let narrative = format!("Single unexplained symptom {root}; no cross-system effects reported.");
    CausalTheory::new(root, vec![], narrative)
}

/// How many reports a theory accounts for: a report counts when its
/// symptom is the root cause or one of the effects.
pub fn coverage(theory: &CausalTheory, reports: &[FaultReport]) -> usize {
    reports
        .iter()
        .filter(|r| {
            let s = symptom(r);
            s == theory.root_cause || theory.effects.contains(&s)
        })
        .count()
}

/// The pure rule backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleGenerator;

impl HypothesisGenerator for RuleGenerator {
    fn classify(&mut self, ctx: &AnomalyContext) -> Result<Classification, HypothesisError> {
        rule_classify(ctx).map(|suspected_system| Classification {
            suspected_system,
            source: Source::Rule,
            raw_response: None,
        })
    }

    fn theorize(
        &mut self,
        reports: &[FaultReport],
        _topology_hint: Option<&TopologyGraph>,
    ) -> Result<CausalTheory, HypothesisError> {
        rule_theorize(reports)
    }
}
