//! The hierarchical reasoner: one belief model for the whole sector,
//! revised only through hypothesize-validate-commit.
//!
//! Every candidate theory passes through layered gates before it may touch
//! the committed model: generator output validation, causal-doctrine
//! precedence, coverage comparison against the incumbent theory, global
//! axiom checking, and physical-connectivity queries. Failures never
//! mutate the model; each leaves a rejection event in the trace.

use std::collections::BTreeSet;

use crate::hypothesis::{coverage, symptom, CausalTheory, HypothesisGenerator};
use crate::kernel::{
    AxiomSet, CommitOutcome, HypothesisTarget, KripkeModel, Proposition, World, WorldId,
};
use crate::vocab;

use super::episode::{RejectLayer, TraceEvent, TraceKind};
use super::topology::{query_connectivity, TopologyGraph};
use super::FaultReport;

/// The nominal belief state: the agent believes the system is healthy but
/// holds the standard fault classes accessible as live possibilities. The
/// klystron world carries both RF propositions so the causal-direction
/// axiom holds globally from the first tick.
pub fn initial_model() -> KripkeModel {
    let wid = |name: &str| WorldId::new(name).expect("static id");
    KripkeModel::new(
        [
            World::new(wid("w0"), [vocab::system_nominal()]),
            World::new(wid("w_cool"), [vocab::cooling_fault_reported()]),
            World::new(
                wid("w_kly"),
                [
                    vocab::klystron_fault_reported(),
                    vocab::rf_power_fault_reported(),
                ],
            ),
            World::new(wid("w_vac"), [vocab::vacuum_fault_reported()]),
        ],
        [
            (wid("w0"), wid("w0")),
            (wid("w0"), wid("w_cool")),
            (wid("w0"), wid("w_kly")),
            (wid("w0"), wid("w_vac")),
            (wid("w_cool"), wid("w_cool")),
            (wid("w_kly"), wid("w_kly")),
            (wid("w_vac"), wid("w_vac")),
        ],
        wid("w0"),
        vocab::belief_vocabulary(),
    )
    .expect("initial belief model is well formed")
}

#[derive(Debug, Clone)]
struct Committed {
    theory: CausalTheory,
    tick: u32,
    world: WorldId,
}

/// Sector-level reasoner state across one episode.
#[derive(Debug, Clone)]
pub struct Reasoner {
    model: KripkeModel,
    reports: Vec<FaultReport>,
    seen: BTreeSet<(String, String, String)>,
    committed: Option<Committed>,
    next_world: u32,
}

impl Default for Reasoner {
    fn default() -> Self {
        Self::new()
    }
}

impl Reasoner {
    pub fn new() -> Self {
        Reasoner {
            model: initial_model(),
            reports: Vec::new(),
            seen: BTreeSet::new(),
            committed: None,
            next_world: 1,
        }
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn reports(&self) -> &[FaultReport] {
        &self.reports
    }

    pub fn committed_theory(&self) -> Option<&CausalTheory> {
        self.committed.as_ref().map(|c| &c.theory)
    }

    pub fn committed_at(&self) -> Option<u32> {
        self.committed.as_ref().map(|c| c.tick)
    }

    pub fn committed_world(&self) -> Option<&WorldId> {
        self.committed.as_ref().map(|c| &c.world)
    }

    /// One reasoning pass. Nothing here is fatal: every failure is
    /// recorded as a trace event and leaves the committed model untouched.
    pub fn reason_tick(
        &mut self,
        tick: u32,
        incoming: Vec<FaultReport>,
        axioms: &AxiomSet,
        topo: &TopologyGraph,
        gen: &mut dyn HypothesisGenerator,
    ) -> Vec<TraceEvent> {
        let mut trace = Vec::new();
        let reject = |layer: RejectLayer, detail: String| TraceEvent {
            tick,
            kind: TraceKind::Reject { layer, detail },
        };

        // Deduplicate on (agent, pv, proposition): a persisting deviation
        // is one finding, not a new one every tick.
        let mut grew = false;
        for report in incoming {
            let key = (
                report.agent().to_string(),
                report.pv().to_string(),
                report.proposition().to_string(),
            );
            if self.seen.insert(key) {
                trace.push(TraceEvent {
                    tick,
                    kind: TraceKind::ReportReceived {
                        agent: report.agent().to_string(),
                        pv: report.pv().to_string(),
                        proposition: report.proposition().to_string(),
                        system: report.classification().suspected_system.to_string(),
                        deviation: report.ctx().deviation,
                        observed: report.ctx().observed,
                    },
                });
                self.reports.push(report);
                grew = true;
            }
        }
        if !grew {
            return trace;
        }

        let theory = match gen.theorize(&self.reports, Some(topo)) {
            Ok(t) => t,
            Err(e) => {
                trace.push(reject(RejectLayer::Generator, e.to_string()));
                return trace;
            }
        };
        trace.push(TraceEvent {
            tick,
            kind: TraceKind::TheoryProposed {
                root_cause: theory.root_cause.to_string(),
                effects: theory.effects.iter().map(ToString::to_string).collect(),
                narrative: theory.narrative.clone(),
            },
        });

        // Generators are untrusted; re-check the vocabulary contract here.
        if let Err(e) = theory.validate() {
            trace.push(reject(RejectLayer::Generator, e.to_string()));
            return trace;
        }

        if let Some(c) = &self.committed {
            if c.theory.root_cause == theory.root_cause && c.theory.effects == theory.effects {
                return trace;
            }
        }

        // Causal doctrine: vacuum events never drive RF-side faults.
        let rf_side = [
            vocab::klystron_fault_reported(),
            vocab::rf_power_fault_reported(),
            vocab::rf_overheat_reported(),
        ];
        if theory.root_cause == vocab::vacuum_fault_reported()
            && theory.effects.iter().any(|e| rf_side.contains(e))
        {
            trace.push(reject(
                RejectLayer::Precedence,
                "vacuum events cannot be the root cause of RF-side faults".to_string(),
            ));
            return trace;
        }

        // A challenger must explain strictly more reports than the
        // incumbent does on today's evidence; ties keep the incumbent.
        let new_coverage = coverage(&theory, &self.reports);
        if let Some(c) = &self.committed {
            let incumbent = coverage(&c.theory, &self.reports);
            if new_coverage <= incumbent {
                trace.push(reject(
                    RejectLayer::Precedence,
                    format!(
                        "coverage {new_coverage} does not beat the committed theory's {incumbent}"
                    ),
                ));
                return trace;
            }
        }

        // Formalize: the diagnosis world asserts the root, the effects and
        // their interpretations; an accessible counterfactual world keeps
        // only the effects. A reversed theory thereby claims the alleged
        // effect can hold without its cause, which the direction axioms
        // can refute.
        let diag_id = WorldId::new(format!("w{}", self.next_world)).expect("generated id");
        let alt_id = WorldId::new(format!("w{}", self.next_world + 1)).expect("generated id");
        let mut diag_val: BTreeSet<Proposition> = BTreeSet::new();
        let mut alt_val: BTreeSet<Proposition> = BTreeSet::new();
        diag_val.insert(theory.root_cause.clone());
        if let Some(meaning) = vocab::diagnosis_interpretation(&theory.root_cause) {
            diag_val.insert(meaning);
        }
        for effect in &theory.effects {
            diag_val.insert(effect.clone());
            alt_val.insert(effect.clone());
            if let Some(meaning) = vocab::diagnosis_interpretation(effect) {
                diag_val.insert(meaning.clone());
                alt_val.insert(meaning);
            }
        }
        if theory.root_cause == vocab::klystron_fault_reported()
            || theory.root_cause == vocab::rf_power_fault_reported()
        {
            diag_val.insert(vocab::rf_fault_is_root_cause());
        }

        let empty = BTreeSet::new();
        let anchor = self.model.current().clone();
        let built = self
            .model
            .with_hypothesis(
                HypothesisTarget::Fresh(alt_id.clone()),
                &alt_val,
                &empty,
                &[(alt_id.clone(), alt_id.clone())],
                None,
            )
            .and_then(|(m, _)| {
                m.with_hypothesis(
                    HypothesisTarget::Fresh(diag_id.clone()),
                    &diag_val,
                    &empty,
                    &[
                        (anchor.clone(), diag_id.clone()),
                        (diag_id.clone(), diag_id.clone()),
                        (diag_id.clone(), alt_id.clone()),
                    ],
                    Some(&diag_id),
                )
            });
        let candidate = match built {
            Ok((m, _)) => m,
            Err(e) => {
                trace.push(reject(RejectLayer::Formalize, e.to_string()));
                return trace;
            }
        };

        let verdict = match candidate.check_axioms(axioms) {
            Ok(v) => v,
            Err(e) => {
                trace.push(reject(RejectLayer::Formalize, e.to_string()));
                return trace;
            }
        };
        trace.push(TraceEvent {
            tick,
            kind: TraceKind::AxiomCheck {
                ok: verdict.ok(),
                violations: verdict
                    .violations()
                    .iter()
                    .map(|v| format!("{}@{}", v.axiom, v.world))
                    .collect(),
            },
        });
        if !verdict.ok() {
            trace.push(reject(
                RejectLayer::Axioms,
                format!("axioms violated: {}", verdict.violated_axioms().join(", ")),
            ));
            return trace;
        }

        // Ground the root in the earliest report carrying it, then require
        // a physical path from that component to every effect's component.
        let root_report = self
            .reports
            .iter()
            .filter(|r| symptom(r) == theory.root_cause)
            .min_by_key(|r| (r.tick(), r.agent().to_string(), r.pv().to_string()));
        let root_report = match root_report {
            Some(r) => r,
            None => {
                trace.push(reject(
                    RejectLayer::Connectivity,
                    format!("no report grounds root cause {}", theory.root_cause),
                ));
                return trace;
            }
        };
        let root_owner = match topo.owner_of(root_report.pv()) {
            Some(owner) => owner.to_string(),
            None => {
                trace.push(reject(
                    RejectLayer::Connectivity,
                    format!("no component owns pv {}", root_report.pv()),
                ));
                return trace;
            }
        };
        let mut queried: BTreeSet<String> = BTreeSet::new();
        for report in self
            .reports
            .iter()
            .filter(|r| theory.effects.contains(&symptom(r)))
        {
            let effect_owner = match topo.owner_of(report.pv()) {
                Some(owner) => owner.to_string(),
                None => {
                    trace.push(reject(
                        RejectLayer::Connectivity,
                        format!("no component owns pv {}", report.pv()),
                    ));
                    return trace;
                }
            };
            if !queried.insert(effect_owner.clone()) {
                continue;
            }
            match query_connectivity(topo, &root_owner, &effect_owner) {
                Ok(answer) => {
                    trace.push(TraceEvent {
                        tick,
                        kind: TraceKind::Connectivity {
                            from: root_owner.clone(),
                            to: effect_owner.clone(),
                            connected: answer.connected,
                            path: answer.path.iter().map(ToString::to_string).collect(),
                        },
                    });
                    if !answer.connected {
                        trace.push(reject(
                            RejectLayer::Connectivity,
                            format!("{root_owner} has no physical path to {effect_owner}"),
                        ));
                        return trace;
                    }
                }
                Err(e) => {
                    trace.push(reject(RejectLayer::Connectivity, e.to_string()));
                    return trace;
                }
            }
        }

        // All gates passed: adopt the candidate and collapse belief onto
        // the diagnosis world.
        let accepted = match self.model.commit(candidate, axioms) {
            Ok(CommitOutcome::Accepted(m)) => m,
            Ok(CommitOutcome::Rejected(v)) => {
                trace.push(reject(
                    RejectLayer::Axioms,
                    format!("axioms violated: {}", v.violated_axioms().join(", ")),
                ));
                return trace;
            }
            Err(e) => {
                trace.push(reject(RejectLayer::Formalize, e.to_string()));
                return trace;
            }
        };
        let keep = BTreeSet::from([diag_id.clone()]);
        let removed: Vec<String> = accepted
            .world_ids()
            .filter(|w| !keep.contains(w))
            .map(|w| w.to_string())
            .collect();
        let pruned = match accepted.prune_worlds(&keep) {
            Ok(m) => m,
            Err(e) => {
                trace.push(reject(RejectLayer::Formalize, e.to_string()));
                return trace;
            }
        };
        trace.push(TraceEvent {
            tick,
            kind: TraceKind::Commit {
                world: diag_id.to_string(),
                root_cause: theory.root_cause.to_string(),
                coverage: new_coverage as u64,
            },
        });
        trace.push(TraceEvent {
            tick,
            kind: TraceKind::Prune {
                kept: vec![diag_id.to_string()],
                removed,
            },
        });
        self.model = pruned;
        self.committed = Some(Committed {
            theory,
            tick,
            world: diag_id,
        });
        self.next_world += 2;
        trace
    }
}
