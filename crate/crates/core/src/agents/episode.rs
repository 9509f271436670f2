//! End-to-end episode orchestration: simulator tick, monitor sweep,
//! classification, reasoning. Single-threaded and deterministic for a
//! fixed seed and the rule generator.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::hypothesis::{HypothesisGenerator, CausalTheory};
use crate::kernel::{AxiomSet, KernelError, KripkeModel, Proposition};
use crate::sim::{PvId, ScenarioSpec, SimError, SimState, TickRecord};
use crate::syntax::AxiomFile;

use super::reasoner::Reasoner;
use super::topology::TopologyGraph;
use super::{detect_anomaly, default_monitors, AgentError, FaultReport, MonitorConfig};

const BUILTIN_AXIOMS: &str = include_str!("../../../../axioms/accelerator.ax");

/// The axiom fixture shipped with the binary: causal direction, fault
/// exclusion, and vacuum pruning for one accelerator sector.
pub fn builtin_axioms() -> AxiomSet {
    AxiomFile::parse(BUILTIN_AXIOMS)
        .expect("builtin axiom fixture parses")
        .into_axiom_set()
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Which gate turned a candidate theory away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectLayer {
    Generator,
    Precedence,
    Formalize,
    Axioms,
    Connectivity,
}

/// One audit-trail entry. Serialized flat: tick plus a tagged payload.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub tick: u32,
    #[serde(flatten)]
    pub kind: TraceKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceKind {
    ReportReceived {
        agent: String,
        pv: String,
        proposition: String,
        system: String,
        deviation: f64,
        observed: f64,
    },
    ClassifyFailed {
        agent: String,
        pv: String,
        reason: String,
    },
    TheoryProposed {
        root_cause: String,
        effects: Vec<String>,
        narrative: String,
    },
    AxiomCheck {
        ok: bool,
        violations: Vec<String>,
    },
    Connectivity {
        from: String,
        to: String,
        connected: bool,
        path: Vec<String>,
    },
    Commit {
        world: String,
        root_cause: String,
        coverage: u64,
    },
    Reject {
        layer: RejectLayer,
        detail: String,
    },
    Prune {
        kept: Vec<String>,
        removed: Vec<String>,
    },
}

/// The episode verdict: what was concluded, the belief model it rests on,
/// and the complete reasoning trace. `root_cause` is absent when the run
/// ended with no committed theory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnosis {
    pub scenario: String,
    pub seed: u64,
    pub root_cause: Option<Proposition>,
    pub theory: Option<CausalTheory>,
    pub committed_at_tick: Option<u32>,
    pub final_model: KripkeModel,
    pub trace: Vec<TraceEvent>,
}

impl Diagnosis {
    /// Stable JSON: struct-ordered keys, pretty-printed, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("diagnosis serialization is total");
        text.push('\n');
        text
    }
}

/// Everything an episode needs besides the scenario itself.
pub struct EpisodeConfig<'a> {
    pub axioms: AxiomSet,
    pub topology: TopologyGraph,
    pub monitors: Vec<MonitorConfig>,
    pub generator: &'a mut dyn HypothesisGenerator,
}

impl<'a> EpisodeConfig<'a> {
    /// The stock sector setup around a caller-chosen generator.
    pub fn sector(generator: &'a mut dyn HypothesisGenerator) -> Self {
        EpisodeConfig {
            axioms: builtin_axioms(),
            topology: TopologyGraph::builtin(),
            monitors: default_monitors(),
            generator,
        }
    }
}

/// A finished episode: the diagnosis plus the raw telemetry it was drawn
/// from.
#[derive(Debug)]
pub struct EpisodeOutcome {
    pub diagnosis: Diagnosis,
    pub records: Vec<TickRecord>,
}

/// Run one scenario end to end.
///
/// Per tick, in fixed order: simulator step, each monitor in agent-id
/// order, classification of each anomaly, one reasoning pass. A
/// classification failure skips that anomaly and leaves a trace event;
/// configuration problems abort before the first tick.
pub fn run_episode(
    spec: &ScenarioSpec,
    cfg: EpisodeConfig<'_>,
) -> Result<EpisodeOutcome, EpisodeError> {
    spec.validate()?;
    let baselines: BTreeMap<PvId, f64> =
        spec.pvs.iter().map(|p| (p.id.clone(), p.baseline)).collect();
    let mut monitors = cfg.monitors;
    monitors.sort_by(|a, b| a.agent().cmp(b.agent()));
    for monitor in &monitors {
        for (pv, _) in monitor.watched() {
            if !baselines.contains_key(pv) {
                return Err(AgentError::MissingBaseline(pv.to_string()).into());
            }
        }
    }

    let generator = cfg.generator;
    let mut reasoner = Reasoner::new();
    let mut sim = SimState::new(spec)?;
    let mut records = Vec::with_capacity(spec.duration_ticks as usize);
    let mut trace = Vec::new();

    for _ in 0..spec.duration_ticks {
        let record = sim.step()?;
        let tick = record.tick;

        let mut reports: Vec<FaultReport> = Vec::new();
        for monitor in &monitors {
            for anomaly in detect_anomaly(monitor, &baselines, &record)? {
                match generator.classify(&anomaly.ctx) {
                    Ok(classification) => reports.push(FaultReport::new(
                        anomaly.agent,
                        tick,
                        classification,
                        anomaly.ctx,
                    )),
                    Err(e) => trace.push(TraceEvent {
                        tick,
                        kind: TraceKind::ClassifyFailed {
                            agent: anomaly.agent,
                            pv: anomaly.ctx.pv.to_string(),
                            reason: e.to_string(),
                        },
                    }),
                }
            }
        }

        trace.extend(reasoner.reason_tick(tick, reports, &cfg.axioms, &cfg.topology, generator));
        // The initial hypothesis space hosts mutually exclusive worlds on
        // purpose; the doctrine binds only once a theory has been committed.
        debug_assert!(
            reasoner.committed_theory().is_none()
                || reasoner
                    .model()
                    .check_axioms(&cfg.axioms)
                    .map(|v| v.ok())
                    .unwrap_or(false),
            "committed model must satisfy the axioms after every tick"
        );
        records.push(record);
    }

    let diagnosis = Diagnosis {
        scenario: spec.id.clone(),
        seed: spec.seed,
        root_cause: reasoner.committed_theory().map(|t| t.root_cause.clone()),
        theory: reasoner.committed_theory().cloned(),
        committed_at_tick: reasoner.committed_at(),
        final_model: reasoner.model().clone(),
        trace,
    };
    Ok(EpisodeOutcome { diagnosis, records })
}
