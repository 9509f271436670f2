//! Deterministic discrete-tick simulator of an accelerator sector.
//!
//! Process variables sit at a baseline, faults perturb them, linear
//! couplings propagate the perturbation through a DAG, and uniform sensor
//! noise is layered on top from one independent RNG stream per PV, so a
//! scenario and a seed fully determine every output byte.

mod scenarios;

pub use scenarios::{builtin_ids, builtin_scenario, CASCADING_COOLING, CONFOUNDED_KLYSTRON, DIRECT_KLYSTRON};

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A source deviation smaller than this does not advance ramp couplings.
const RAMP_EPS: f64 = 1e-9;

/// Process-variable name of the form `SUBSYSTEM:signal`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PvId(String);

impl PvId {
    pub fn new(name: impl Into<String>) -> Result<Self, SimError> {
        let name = name.into();
        let mut parts = name.splitn(2, ':');
        let subsystem = parts.next().unwrap_or("");
        let signal = parts.next();
        match signal {
            Some(signal)
                if !subsystem.is_empty() && !signal.is_empty() && !signal.contains(':') =>
            {
                Ok(PvId(name))
            }
            _ => Err(SimError::BadPvId(name)),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part before the colon.
    pub fn subsystem(&self) -> &str {
        self.0.split(':').next().expect("validated at construction")
    }

    /// The part after the colon.
    pub fn signal(&self) -> &str {
        self.0.splitn(2, ':').nth(1).expect("validated at construction")
    }
}

impl fmt::Display for PvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for PvId {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        PvId::new(s)
    }
}

impl From<PvId> for String {
    fn from(p: PvId) -> String {
        p.0
    }
}

/// One process variable: baseline value, uniform noise half-width, units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    pub id: PvId,
    pub baseline: f64,
    pub noise_amplitude: f64,
    pub units: String,
}

/// How a coupling target reacts to its source deviating from baseline.
///
/// `instant` adds `gain × deviation` after `delay_ticks`; `ramp` adds
/// `ramp_rate` per tick while the (delayed) source deviates, and the
/// accumulated offset persists after the source recovers. Ramp couplings
/// ignore `gain`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    Instant,
    Ramp,
}

/// A directed linear coupling between two PVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRule {
    pub source: PvId,
    pub target: PvId,
    pub gain: f64,
    pub delay_ticks: u32,
    pub mode: CouplingMode,
    pub ramp_rate: f64,
}

/// Fault shapes: `stuck` pins the PV at `magnitude` (absolute) for the rest
/// of the run, overriding couplings and steps; `step` adds `magnitude` once,
/// permanently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    Stuck,
    Step,
}

/// One scheduled fault injection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub tick: u32,
    pub target: PvId,
    pub kind: FaultKind,
    pub magnitude: f64,
}

/// A declarative fault scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    pub duration_ticks: u32,
    pub seed: u64,
    pub pvs: Vec<PvSpec>,
    pub couplings: Vec<CouplingRule>,
    pub faults: Vec<FaultSpec>,
}

/// One tick of output: post-noise observations and noise-free truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u32,
    pub values: BTreeMap<PvId, f64>,
    pub truth: BTreeMap<PvId, f64>,
}

/// Simulator errors; scenario shape problems are caught at load time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("pv name {0:?} is not of the form SUBSYSTEM:signal")]
    BadPvId(String),
    #[error("duplicate pv {0}")]
    DuplicatePv(String),
    #[error("{role} references undeclared pv {pv}")]
    UndeclaredPv { role: &'static str, pv: String },
    #[error("coupling graph has a cycle through {{{0}}}")]
    CouplingCycle(String),
    #[error("duration_ticks must be > 0")]
    ZeroDuration,
    #[error("noise_amplitude of {pv} must be >= 0")]
    NegativeNoise { pv: String },
    #[error("ramp coupling {from} -> {to} must have ramp_rate != 0")]
    ZeroRampRate { from: String, to: String },
    #[error("fault at tick {tick} is outside the scenario duration {duration}")]
    FaultTickOutOfRange { tick: u32, duration: u32 },
    #[error("cannot step past the scenario duration {0}")]
    PastEnd(u32),
    #[error("invalid scenario JSON: {0}")]
    Json(String),
}

impl ScenarioSpec {
    pub fn from_json_str(text: &str) -> Result<Self, SimError> {
        let spec: ScenarioSpec =
            serde_json::from_str(text).map_err(|e| SimError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialization is total");
        s.push('\n');
        s
    }

    /// Check every structural invariant, including acyclicity of couplings.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.duration_ticks == 0 {
            return Err(SimError::ZeroDuration);
        }
        let mut declared = BTreeMap::new();
        for (i, pv) in self.pvs.iter().enumerate() {
            if declared.insert(pv.id.clone(), i).is_some() {
                return Err(SimError::DuplicatePv(pv.id.to_string()));
            }
            if pv.noise_amplitude < 0.0 {
                return Err(SimError::NegativeNoise {
                    pv: pv.id.to_string(),
                });
            }
        }
        for c in &self.couplings {
            for (role, pv) in [("coupling source", &c.source), ("coupling target", &c.target)] {
                if !declared.contains_key(pv) {
                    return Err(SimError::UndeclaredPv {
                        role,
                        pv: pv.to_string(),
                    });
                }
            }
            if c.mode == CouplingMode::Ramp && c.ramp_rate == 0.0 {
                return Err(SimError::ZeroRampRate {
                    from: c.source.to_string(),
                    to: c.target.to_string(),
                });
            }
        }
        for f in &self.faults {
            if !declared.contains_key(&f.target) {
                return Err(SimError::UndeclaredPv {
                    role: "fault target",
                    pv: f.target.to_string(),
                });
            }
            if f.tick >= self.duration_ticks {
                return Err(SimError::FaultTickOutOfRange {
                    tick: f.tick,
                    duration: self.duration_ticks,
                });
            }
        }
        topological_order(self).map(|_| ())
    }
}

/// Kahn's algorithm over the coupling graph; deterministic because ready
/// nodes are drained in declaration order.
fn topological_order(spec: &ScenarioSpec) -> Result<Vec<usize>, SimError> {
    let index: BTreeMap<&PvId, usize> = spec.pvs.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();
    let n = spec.pvs.len();
    let mut indegree = vec![0usize; n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in &spec.couplings {
        let s = index[&c.source];
        let t = index[&c.target];
        indegree[t] += 1;
        outgoing[s].push(t);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(i);
        for &t in &outgoing[i] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() < n {
        let stuck: Vec<&str> = (0..n)
            .filter(|&i| indegree[i] > 0)
            .map(|i| spec.pvs[i].id.as_str())
            .collect();
        return Err(SimError::CouplingCycle(stuck.join(", ")));
    }
    Ok(order)
}

/// One independent, portable stream per PV: adding or removing a PV never
/// perturbs another PV's noise.
fn pv_rng(seed: u64, pv: &PvId) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(b":");
    hasher.update(pv.as_str().as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// The evolving simulation; a plain value, snapshot by cloning.
#[derive(Debug, Clone)]
pub struct SimState {
    spec: ScenarioSpec,
    order: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    tick: u32,
    stuck: Vec<Option<f64>>,
    step_offset: Vec<f64>,
    ramp_offset: Vec<f64>,
    history: Vec<Vec<f64>>,
    rng: Vec<ChaCha8Rng>,
}

impl SimState {
    pub fn new(spec: &ScenarioSpec) -> Result<Self, SimError> {
        spec.validate()?;
        let order = topological_order(spec)?;
        let index: BTreeMap<&PvId, usize> =
            spec.pvs.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); spec.pvs.len()];
        for (ci, c) in spec.couplings.iter().enumerate() {
            incoming[index[&c.target]].push(ci);
        }
        let rng = spec.pvs.iter().map(|p| pv_rng(spec.seed, &p.id)).collect();
        Ok(SimState {
            spec: spec.clone(),
            order,
            incoming,
            tick: 0,
            stuck: vec![None; spec.pvs.len()],
            step_offset: vec![0.0; spec.pvs.len()],
            ramp_offset: vec![0.0; spec.couplings.len()],
            history: Vec::new(),
            rng,
        })
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    /// Advance one tick: apply scheduled faults, propagate couplings in
    /// topological order, then add sensor noise.
    pub fn step(&mut self) -> Result<TickRecord, SimError> {
        if self.tick >= self.spec.duration_ticks {
            return Err(SimError::PastEnd(self.spec.duration_ticks));
        }
        let t = self.tick;
        let index: BTreeMap<&PvId, usize> =
            self.spec.pvs.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();

        for f in &self.spec.faults {
            if f.tick == t {
                let i = index[&f.target];
                match f.kind {
                    FaultKind::Stuck => self.stuck[i] = Some(f.magnitude),
                    FaultKind::Step => self.step_offset[i] += f.magnitude,
                }
            }
        }

        let mut truth = vec![0.0; self.spec.pvs.len()];
        for &i in &self.order {
            let mut value = self.spec.pvs[i].baseline + self.step_offset[i];
            for &ci in &self.incoming[i] {
                let c = &self.spec.couplings[ci];
                let si = index[&c.source];
                // Source deviation at tick t - delay; before the run starts
                // the source sat at its baseline.
                let deviation = match t.checked_sub(c.delay_ticks) {
                    None => 0.0,
                    Some(past) if past == t => truth[si] - self.spec.pvs[si].baseline,
                    Some(past) => self.history[past as usize][si] - self.spec.pvs[si].baseline,
                };
                match c.mode {
                    CouplingMode::Instant => value += c.gain * deviation,
                    CouplingMode::Ramp => {
                        if deviation.abs() > RAMP_EPS {
                            self.ramp_offset[ci] += c.ramp_rate;
                        }
                        value += self.ramp_offset[ci];
                    }
                }
            }
            if let Some(pin) = self.stuck[i] {
                value = pin;
            }
            truth[i] = value;
        }

        let mut values = BTreeMap::new();
        let mut truth_map = BTreeMap::new();
        for (i, pv) in self.spec.pvs.iter().enumerate() {
            let unit: f64 = self.rng[i].random();
            let noise = (2.0 * unit - 1.0) * pv.noise_amplitude;
            values.insert(pv.id.clone(), truth[i] + noise);
            truth_map.insert(pv.id.clone(), truth[i]);
        }
        self.history.push(truth);
        self.tick += 1;
        Ok(TickRecord {
            tick: t,
            values,
            truth: truth_map,
        })
    }
}

/// Run a whole scenario: `duration_ticks` records, deterministic in
/// (spec, seed).
pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<TickRecord>, SimError> {
    let mut state = SimState::new(spec)?;
    let mut records = Vec::with_capacity(spec.duration_ticks as usize);
    for _ in 0..spec.duration_ticks {
        records.push(state.step()?);
    }
    Ok(records)
}

/// CSV export: header `tick,<pv names sorted>`, observed values to six
/// decimal places.
pub fn to_csv(records: &[TickRecord]) -> String {
    let mut out = String::from("tick");
    if let Some(first) = records.first() {
        for pv in first.values.keys() {
            out.push(',');
            out.push_str(pv.as_str());
        }
    }
    out.push('\n');
    for r in records {
        out.push_str(&r.tick.to_string());
        for v in r.values.values() {
            out.push_str(&format!(",{v:.6}"));
        }
        out.push('\n');
    }
    out
}
