//! Built-in fault scenarios for one accelerator sector.
//!
//! The sector has a cooling loop, a klystron feeding an RF cavity, and a
//! vacuum pump. Cooling valve position couples into cavity temperature as a
//! ramp (a degraded valve makes the cavity heat steadily); klystron output
//! couples into forward power instantly.

use super::{
    CouplingMode, CouplingRule, FaultKind, FaultSpec, PvId, PvSpec, ScenarioSpec, SimError,
};

pub const CASCADING_COOLING: &str = "cascading_cooling";
pub const DIRECT_KLYSTRON: &str = "direct_klystron";
pub const CONFOUNDED_KLYSTRON: &str = "confounded_klystron";

/// Identifiers accepted by [`builtin_scenario`].
pub fn builtin_ids() -> [&'static str; 3] {
    [CASCADING_COOLING, DIRECT_KLYSTRON, CONFOUNDED_KLYSTRON]
}

fn pv(name: &str) -> PvId {
    PvId::new(name).expect("builtin pv names are well formed")
}

fn sector_pvs() -> Vec<PvSpec> {
    vec![
        PvSpec {
            id: pv("COOL:valve_position"),
            baseline: 72.0,
            noise_amplitude: 0.2,
            units: "%".into(),
        },
        PvSpec {
            id: pv("RF:cavity_temp"),
            baseline: 35.0,
            noise_amplitude: 0.05,
            units: "degC".into(),
        },
        PvSpec {
            id: pv("RF:klystron_output"),
            baseline: 5.0,
            noise_amplitude: 0.01,
            units: "MW".into(),
        },
        PvSpec {
            id: pv("RF:forward_power"),
            baseline: 4.2,
            noise_amplitude: 0.01,
            units: "MW".into(),
        },
        PvSpec {
            id: pv("VAC:pressure"),
            baseline: 20.0,
            noise_amplitude: 0.05,
            units: "nTorr".into(),
        },
    ]
}

fn sector_couplings() -> Vec<CouplingRule> {
    vec![
        // A displaced valve heats the cavity 2.5 degC per tick for as long
        // as the displacement lasts.
        CouplingRule {
            source: pv("COOL:valve_position"),
            target: pv("RF:cavity_temp"),
            gain: 0.0,
            delay_ticks: 0,
            mode: CouplingMode::Ramp,
            ramp_rate: 2.5,
        },
        // Forward power follows klystron output within the same tick.
        CouplingRule {
            source: pv("RF:klystron_output"),
            target: pv("RF:forward_power"),
            gain: 0.84,
            delay_ticks: 0,
            mode: CouplingMode::Instant,
            ramp_rate: 0.0,
        },
    ]
}

fn sector_scenario(id: &str, faults: Vec<FaultSpec>) -> ScenarioSpec {
    let spec = ScenarioSpec {
        id: id.into(),
        duration_ticks: 8,
        seed: 42,
        pvs: sector_pvs(),
        couplings: sector_couplings(),
        faults,
    };
    spec.validate().expect("builtin scenarios are well formed");
    spec
}

/// Look up a built-in scenario by identifier.
pub fn builtin_scenario(id: &str) -> Result<ScenarioSpec, SimError> {
    match id {
        // The cooling valve jams far from its setpoint; the cavity heats
        // tick after tick. Two subsystems alarm but only one is the cause.
        CASCADING_COOLING => Ok(sector_scenario(
            id,
            vec![FaultSpec {
                tick: 3,
                target: pv("COOL:valve_position"),
                kind: FaultKind::Stuck,
                magnitude: 30.0,
            }],
        )),
        // The klystron loses 1.2 MW in one step; forward power sags with it.
        DIRECT_KLYSTRON => Ok(sector_scenario(
            id,
            vec![FaultSpec {
                tick: 3,
                target: pv("RF:klystron_output"),
                kind: FaultKind::Step,
                magnitude: -1.2,
            }],
        )),
        // Same klystron fault plus a vacuum pressure wobble that stays
        // below the vacuum monitor's threshold: a distractor, not a cause.
        CONFOUNDED_KLYSTRON => Ok(sector_scenario(
            id,
            vec![
                FaultSpec {
                    tick: 3,
                    target: pv("RF:klystron_output"),
                    kind: FaultKind::Step,
                    magnitude: -1.2,
                },
                FaultSpec {
                    tick: 4,
                    target: pv("VAC:pressure"),
                    kind: FaultKind::Step,
                    magnitude: 0.8,
                },
            ],
        )),
        other => Err(SimError::UnknownScenario(other.into())),
    }
}
