//! The three-layer diagnostic architecture: threshold monitors watching
//! small PV sets, one hierarchical reasoner holding the sector belief
//! model, and a topology knowledge agent answering connectivity queries.

mod episode;
mod reasoner;
mod topology;

pub use episode::{
    builtin_axioms, run_episode, Diagnosis, EpisodeConfig, EpisodeError, EpisodeOutcome,
    RejectLayer, TraceEvent, TraceKind,
};
pub use reasoner::{initial_model, Reasoner};
pub use topology::{query_connectivity, ConnectivityAnswer, Relation, TopologyEdge, TopologyGraph};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::hypothesis::{AnomalyContext, Classification, SystemClass};
use crate::kernel::Proposition;
use crate::sim::{PvId, TickRecord};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("tick record is missing watched pv {0}")]
    MissingPv(String),
    #[error("no baseline known for watched pv {0}")]
    MissingBaseline(String),
    #[error("threshold for {0} must be strictly positive")]
    BadThreshold(String),
    #[error("unknown component {0:?}")]
    UnknownComponent(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
}

/// A monitor's observation of one deviating PV.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyReport {
    pub agent: String,
    pub ctx: AnomalyContext,
}

/// A classified anomaly, ready for the reasoner.
///
/// Constructor-enforced: `proposition` always equals
/// `map_to_proposition(classification)`, so downstream code never sees a
/// report whose formal atom disagrees with its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultReport {
    agent: String,
    tick: u32,
    classification: Classification,
    ctx: AnomalyContext,
    proposition: Proposition,
}

impl FaultReport {
    pub fn new(
        agent: impl Into<String>,
        tick: u32,
        classification: Classification,
        ctx: AnomalyContext,
    ) -> Self {
        let proposition = map_to_proposition(&classification);
        FaultReport {
            agent: agent.into(),
            tick,
            classification,
            ctx,
            proposition,
        }
    }

    pub fn agent(&self) -> &str {
        &self.agent
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn ctx(&self) -> &AnomalyContext {
        &self.ctx
    }

    pub fn pv(&self) -> &PvId {
        &self.ctx.pv
    }

    pub fn proposition(&self) -> &Proposition {
        &self.proposition
    }
}

/// The fixed dictionary from subsystem attribution to formal atom.
pub fn map_to_proposition(c: &Classification) -> Proposition {
    match c.suspected_system {
        SystemClass::Cooling => vocab::cooling_fault_reported(),
        SystemClass::Klystron => vocab::klystron_fault_reported(),
        SystemClass::Power => vocab::rf_power_fault_reported(),
        SystemClass::Vacuum => vocab::vacuum_fault_reported(),
    }
}

/// One monitor: an agent id and the PVs it watches, each with a strictly
/// positive reporting threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorConfig {
    agent: String,
    watched: BTreeMap<PvId, f64>,
}

impl MonitorConfig {
    pub fn new(
        agent: impl Into<String>,
        watched: impl IntoIterator<Item = (PvId, f64)>,
    ) -> Result<Self, AgentError> {
        let agent = agent.into();
        let watched: BTreeMap<PvId, f64> = watched.into_iter().collect();
        for (pv, threshold) in &watched {
            if !(*threshold > 0.0) {
                return Err(AgentError::BadThreshold(pv.to_string()));
            }
        }
        Ok(MonitorConfig { agent, watched })
    }

    pub fn agent(&self) -> &str {
        &self.agent
    }

    pub fn watched(&self) -> impl Iterator<Item = (&PvId, f64)> {
        self.watched.iter().map(|(pv, t)| (pv, *t))
    }
}

/// The sector's monitor fleet. Thresholds are sized so ordinary sensor
/// noise never reports: each threshold is at least an order of magnitude
/// above the PV's noise amplitude.
pub fn default_monitors() -> Vec<MonitorConfig> {
    let pv = |name: &str| PvId::new(name).expect("builtin pv names are well formed");
    vec![
        MonitorConfig::new("Cooling_Agent", [(pv("COOL:valve_position"), 5.0)]),
        MonitorConfig::new("Klystron_Agent", [(pv("RF:klystron_output"), 0.3)]),
        MonitorConfig::new(
            "RF_Agent",
            [(pv("RF:cavity_temp"), 4.0), (pv("RF:forward_power"), 0.25)],
        ),
        MonitorConfig::new("Vacuum_Agent", [(pv("VAC:pressure"), 2.0)]),
    ]
    .into_iter()
    .collect::<Result<_, _>>()
    .expect("builtin thresholds are positive")
}

/// Threshold detection: report exactly those watched PVs whose observed
/// value strays more than the threshold from baseline. Sub-threshold
/// deviations are environmental noise and produce nothing.
pub fn detect_anomaly(
    cfg: &MonitorConfig,
    baselines: &BTreeMap<PvId, f64>,
    record: &TickRecord,
) -> Result<Vec<AnomalyReport>, AgentError> {
    let mut reports = Vec::new();
    for (pv, threshold) in cfg.watched() {
        let observed = *record
            .values
            .get(pv)
            .ok_or_else(|| AgentError::MissingPv(pv.to_string()))?;
        let baseline = *baselines
            .get(pv)
            .ok_or_else(|| AgentError::MissingBaseline(pv.to_string()))?;
        let ctx = AnomalyContext::new(pv.clone(), record.tick, observed, baseline);
        if ctx.deviation.abs() > threshold {
            reports.push(AnomalyReport {
                agent: cfg.agent.clone(),
                ctx,
            });
        }
    }
    Ok(reports)
}
