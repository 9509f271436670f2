//! Hypothesis generation: turning anomalies into suspected subsystems and
//! report sets into causal theories.
//!
//! Two interchangeable backends implement [`HypothesisGenerator`]: a
//! deterministic rule table ([`RuleGenerator`]) and a remote language-model
//! client ([`RemoteGenerator`]) speaking a constrained JSON protocol. The
//! remote backend can only ever emit vocabulary-checked output; after its
//! retry budget it falls back to the rules, so diagnosis always terminates.

mod rules;
mod remote;

pub use remote::{
    parse_lm_response, parse_theory_response, HttpTransport, LmTransport, RemoteGenerator,
};
pub use rules::{coverage, rule_classify, rule_theorize, symptom, RuleGenerator};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{FaultReport, TopologyGraph};
use crate::kernel::Proposition;
use crate::sim::PvId;
use crate::vocab;

/// The closed set of subsystems an anomaly can be attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SystemClass {
    Cooling,
    Power,
    Vacuum,
    Klystron,
}

impl SystemClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemClass::Cooling => "Cooling",
            SystemClass::Power => "Power",
            SystemClass::Vacuum => "Vacuum",
            SystemClass::Klystron => "Klystron",
        }
    }
}

impl fmt::Display for SystemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which backend produced a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Rule,
    Remote,
}

/// A vetted subsystem attribution; `raw_response` keeps the verbatim
/// backend reply for audit when one was received.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub suspected_system: SystemClass,
    pub source: Source,
    pub raw_response: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Above => "above",
            Direction::Below => "below",
        })
    }
}

/// One PV deviating from its baseline at one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyContext {
    pub pv: PvId,
    pub tick: u32,
    pub observed: f64,
    pub baseline: f64,
    pub deviation: f64,
    pub direction: Direction,
}

impl AnomalyContext {
    /// Derives deviation and direction, keeping them consistent by
    /// construction.
    pub fn new(pv: PvId, tick: u32, observed: f64, baseline: f64) -> Self {
        let deviation = observed - baseline;
        let direction = if deviation >= 0.0 {
            Direction::Above
        } else {
            Direction::Below
        };
        AnomalyContext {
            pv,
            tick,
            observed,
            baseline,
            deviation,
            direction,
        }
    }
}

/// One root cause plus the reported effects it explains. The narrative is
/// audit-only free text; the propositions are the contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalTheory {
    pub root_cause: Proposition,
    pub effects: Vec<Proposition>,
    pub narrative: String,
}

impl CausalTheory {
    pub fn new(
        root_cause: Proposition,
        effects: Vec<Proposition>,
        narrative: impl Into<String>,
    ) -> Result<Self, HypothesisError> {
        let theory = CausalTheory {
            root_cause,
            effects,
            narrative: narrative.into(),
        };
        theory.validate()?;
        Ok(theory)
    }

    /// Every proposition must sit in the belief vocabulary and the root
    /// must not be listed among its own effects.
    pub fn validate(&self) -> Result<(), HypothesisError> {
        let vocabulary = vocab::belief_vocabulary();
        for p in std::iter::once(&self.root_cause).chain(&self.effects) {
            if !vocabulary.contains(p) {
                return Err(HypothesisError::InvalidTheory(format!(
                    "proposition {p} is outside the belief vocabulary"
                )));
            }
        }
        if self.effects.contains(&self.root_cause) {
            return Err(HypothesisError::InvalidTheory(format!(
                "root cause {} listed among its own effects",
                self.root_cause
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisError {
    #[error("no rule classifies pv {pv} deviating {direction}")]
    Unclassifiable { pv: String, direction: Direction },
    #[error("cannot theorize over an empty report set")]
    NoReports,
    #[error("invalid causal theory: {0}")]
    InvalidTheory(String),
    #[error("lm transport failed: {0}")]
    Transport(String),
    #[error("lm endpoint not configured; set MODALGUARD_LM_ENDPOINT")]
    MissingEndpoint,
    #[error("lm reply rejected: {0}")]
    Lm(#[from] LmParseError),
}

/// Why a backend reply was rejected; kept distinct so retry logs can name
/// the failure mode.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LmParseError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("reply is not a JSON object")]
    NotAnObject,
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("value {0:?} is outside the allowed vocabulary")]
    OutOfVocabulary(String),
    #[error("inconsistent theory: {0}")]
    Inconsistent(String),
}

/// A pluggable anomaly classifier and causal theorizer.
///
/// `&mut self` because the remote implementation owns a connection and a
/// retry budget; the rule implementation is pure.
pub trait HypothesisGenerator {
    fn classify(&mut self, ctx: &AnomalyContext) -> Result<Classification, HypothesisError>;

    fn theorize(
        &mut self,
        reports: &[FaultReport],
        topology_hint: Option<&TopologyGraph>,
    ) -> Result<CausalTheory, HypothesisError>;
}
