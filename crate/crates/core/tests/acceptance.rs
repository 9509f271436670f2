//! The release gate. Every criterion the project promises is run here,
//! each with its stated budget, and every verdict is printed whether or
//! not the gate as a whole passes. Run with `-- --nocapture` to watch.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{gen_formula, gen_model, pick_world, ref_eval};
use modalguard::agents::{
    builtin_axioms, initial_model, run_episode, Diagnosis, EpisodeConfig, FaultReport, Reasoner,
    RejectLayer, TopologyGraph, TraceKind,
};
use modalguard::hypothesis::{
    AnomalyContext, CausalTheory, Classification, HypothesisError, HypothesisGenerator,
    RuleGenerator, Source, SystemClass,
};
use modalguard::kernel::{CommitOutcome, HypothesisTarget, WorldId};
use modalguard::sim::{builtin_scenario, PvId};
use modalguard::syntax::{parse, render, AxiomFile};
use modalguard::vocab;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Gate {
    lines: Vec<String>,
    failures: usize,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new(), failures: 0 }
    }

    fn criterion(
        &mut self,
        name: &str,
        budget: Option<Duration>,
        body: impl FnOnce() -> Result<(), String>,
    ) {
        let started = Instant::now();
        let mut verdict = body();
        let elapsed = started.elapsed();
        if verdict.is_ok() {
            if let Some(limit) = budget {
                if elapsed > limit {
                    verdict = Err(format!(
                        "over budget: took {elapsed:.2?}, limit {limit:.2?}"
                    ));
                }
            }
        }
        let line = match &verdict {
            Ok(()) => format!("{name}: PASS ({elapsed:.2?})"),
            Err(reason) => {
                self.failures += 1;
                format!("{name}: FAIL ({elapsed:.2?}) {reason}")
            }
        };
        println!("{line}");
        self.lines.push(line);
    }
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn run_builtin(id: &str) -> Result<Diagnosis, String> {
    let spec = builtin_scenario(id).map_err(|e| e.to_string())?;
    let mut gen = RuleGenerator;
    run_episode(&spec, EpisodeConfig::sector(&mut gen))
        .map(|o| o.diagnosis)
        .map_err(|e| e.to_string())
}

fn report(agent: &str, tick: u32, pv: &str, system: SystemClass, observed: f64, baseline: f64) -> FaultReport {
    let ctx = AnomalyContext::new(PvId::new(pv).unwrap(), tick, observed, baseline);
    let classification = Classification {
        suspected_system: system,
        source: Source::Rule,
        raw_response: None,
    };
    FaultReport::new(agent, tick, classification, ctx)
}

fn klystron_reports() -> Vec<FaultReport> {
    vec![
        report("Klystron_Agent", 3, "RF:klystron_output", SystemClass::Klystron, 3.8, 5.0),
        report("RF_Agent", 3, "RF:forward_power", SystemClass::Power, 3.19, 4.2),
    ]
}

struct FixedTheory(CausalTheory);

impl HypothesisGenerator for FixedTheory {
    fn classify(&mut self, ctx: &AnomalyContext) -> Result<Classification, HypothesisError> {
        RuleGenerator.classify(ctx)
    }
    fn theorize(
        &mut self,
        _reports: &[FaultReport],
        _hint: Option<&TopologyGraph>,
    ) -> Result<CausalTheory, HypothesisError> {
        Ok(self.0.clone())
    }
}

fn criterion_1_cascading() -> Result<(), String> {
    let diag = run_builtin("cascading_cooling")?;
    ensure(
        diag.root_cause == Some(vocab::cooling_fault_reported()),
        &format!("root cause was {:?}", diag.root_cause),
    )?;
    let valuation = diag
        .final_model
        .valuation(diag.final_model.current())
        .map_err(|e| e.to_string())?;
    ensure(
        valuation.contains(&vocab::cooling_insufficient()),
        "cooling_insufficient missing from the committed world",
    )?;
    ensure(
        valuation.contains(&vocab::rf_overheats()),
        "RF_overheats missing from the committed world",
    )?;
    let w0 = WorldId::new("w0").unwrap();
    ensure(
        !diag.final_model.contains_world(&w0),
        "nominal world w0 survived the prune",
    )
}

fn criterion_2_direct() -> Result<(), String> {
    let diag = run_builtin("direct_klystron")?;
    ensure(
        diag.root_cause == Some(vocab::klystron_fault_reported()),
        &format!("root cause was {:?}", diag.root_cause),
    )?;
    ensure(
        diag.final_model.world_count() == 1,
        &format!("expected exactly one world, got {}", diag.final_model.world_count()),
    )
}

fn criterion_3_confounded() -> Result<(), String> {
    let confounded = run_builtin("confounded_klystron")?;
    let direct = run_builtin("direct_klystron")?;
    ensure(
        !confounded.to_canonical_json().contains("Vacuum_Agent"),
        "the trace mentions Vacuum_Agent",
    )?;
    ensure(
        confounded.root_cause == direct.root_cause,
        "confounded root cause differs from the direct run",
    )?;
    let val = |d: &Diagnosis| d.final_model.valuation(d.final_model.current()).ok().cloned();
    ensure(
        val(&confounded) == val(&direct),
        "committed valuations differ between confounded and direct runs",
    )
}

fn criterion_4_reversed_causality() -> Result<(), String> {
    let axioms = builtin_axioms();
    let model = initial_model();
    let wid = |s: &str| WorldId::new(s).unwrap();
    let (candidate, _) = model
        .with_hypothesis(
            HypothesisTarget::Fresh(wid("w_rev")),
            &BTreeSet::from([vocab::klystron_fault_reported()]),
            &BTreeSet::new(),
            &[(wid("w0"), wid("w_rev")), (wid("w_rev"), wid("w_rev"))],
            None,
        )
        .map_err(|e| e.to_string())?;
    match model.commit(candidate, &axioms).map_err(|e| e.to_string())? {
        CommitOutcome::Accepted(_) => Err("reversed-causality candidate was accepted".into()),
        CommitOutcome::Rejected(verdict) => ensure(
            verdict.violated_axioms().contains(&"causal_direction"),
            &format!("rejection named {:?}, not causal_direction", verdict.violated_axioms()),
        ),
    }
}

fn criterion_5_vacuum_defense() -> Result<(), String> {
    let axioms = builtin_axioms();
    let topo = TopologyGraph::builtin();

    // Forcing the vacuum report past the threshold does not move the root.
    let mut reasoner = Reasoner::new();
    let mut gen = RuleGenerator;
    let mut incoming = klystron_reports();
    incoming.push(report("Vacuum_Agent", 3, "VAC:pressure", SystemClass::Vacuum, 23.0, 20.0));
    reasoner.reason_tick(3, incoming, &axioms, &topo, &mut gen);
    let theory = reasoner
        .committed_theory()
        .ok_or("no theory committed with the forced vacuum report")?;
    ensure(
        theory.root_cause == vocab::klystron_fault_reported(),
        &format!("root moved to {}", theory.root_cause),
    )?;

    // Vacuum as the root of an RF effect dies at the precedence gate.
    let mut reasoner = Reasoner::new();
    let mut adversary = FixedTheory(CausalTheory {
        root_cause: vocab::vacuum_fault_reported(),
        effects: vec![vocab::rf_power_fault_reported()],
        narrative: "vacuum did it".into(),
    });
    let trace = reasoner.reason_tick(3, klystron_reports(), &axioms, &topo, &mut adversary);
    ensure(
        trace.iter().any(|e| {
            matches!(&e.kind, TraceKind::Reject { layer: RejectLayer::Precedence, .. })
        }),
        "vacuum-rooted theory was not rejected at the precedence gate",
    )?;
    ensure(reasoner.committed_theory().is_none(), "vacuum-rooted theory committed")?;

    // Vacuum implicated under an RF root dies on the vacuum_prune axiom.
    let mut reasoner = Reasoner::new();
    let mut adversary = FixedTheory(CausalTheory {
        root_cause: vocab::rf_power_fault_reported(),
        effects: vec![vocab::vacuum_fault_reported()],
        narrative: "vacuum helped".into(),
    });
    let trace = reasoner.reason_tick(3, klystron_reports(), &axioms, &topo, &mut adversary);
    ensure(
        trace.iter().any(|e| matches!(
            &e.kind,
            TraceKind::Reject { layer: RejectLayer::Axioms, detail } if detail.contains("vacuum_prune")
        )),
        "vacuum-implicating theory was not rejected by vacuum_prune",
    )?;
    ensure(reasoner.committed_theory().is_none(), "vacuum-implicating theory committed")
}

fn criterion_6_oracle_equivalence() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E_2026);
    for case in 0..1200 {
        let (model, mirror) = gen_model(&mut rng, 5);
        let f = gen_formula(&mut rng, 4);
        let w = pick_world(&mut rng, &model);
        let got = model.eval_at(&w, &f).map_err(|e| e.to_string())?;
        let want = ref_eval(&mirror, w.as_str(), &f);
        if got != want {
            return Err(format!("case {case}: eval_at disagrees with brute force at {w} on {f:?}"));
        }
        let box_f = modalguard::kernel::Formula::necessarily(f.clone());
        let dual = modalguard::kernel::Formula::not(modalguard::kernel::Formula::possibly(
            modalguard::kernel::Formula::not(f),
        ));
        let lhs = model.eval_at(&w, &box_f).map_err(|e| e.to_string())?;
        let rhs = model.eval_at(&w, &dual).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("case {case}: duality broken at {w}"));
        }
    }
    Ok(())
}

fn criterion_7_parser_round_trip() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_50F7);
    for case in 0..1200 {
        let f = gen_formula(&mut rng, 6);
        let text = render(&f);
        let back = parse(&text).map_err(|e| format!("case {case}: {text:?} failed to reparse: {e}"))?;
        if back != f {
            return Err(format!("case {case}: round trip changed {f:?} via {text:?}"));
        }
    }

    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../axioms/accelerator.ax");
    let text = fs::read_to_string(&shipped).map_err(|e| e.to_string())?;
    let file = AxiomFile::parse(&text).map_err(|e| e.to_string())?;
    ensure(file.entries.len() == 3, "fixture does not hold three axioms")?;
    for entry in &file.entries {
        let rendered = render(&entry.formula);
        let back = parse(&rendered).map_err(|e| format!("{}: {e}", entry.label))?;
        if back != entry.formula {
            return Err(format!("axiom {} does not reparse identically", entry.label));
        }
    }
    Ok(())
}

fn criterion_8_byte_identical_outputs() -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_modalguard");
    for id in ["cascading_cooling", "direct_klystron", "confounded_klystron"] {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        for dir in [&a, &b] {
            let out = Command::new(bin)
                .args(["run", "--scenario", id, "--out", dir.path().to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            if out.status.code() != Some(0) {
                return Err(format!(
                    "{id}: run exited {:?}: {}",
                    out.status.code(),
                    String::from_utf8_lossy(&out.stderr)
                ));
            }
        }
        for name in ["timeseries.csv", "diagnosis.json", "final_model.json"] {
            let left = fs::read(a.path().join(name)).map_err(|e| e.to_string())?;
            let right = fs::read(b.path().join(name)).map_err(|e| e.to_string())?;
            if left != right {
                return Err(format!("{id}: {name} differs between identical runs"));
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance_gate() {
    let second = Duration::from_secs(1);
    let mut gate = Gate::new();
    gate.criterion("criterion 1 (cascading cooling diagnosis)", Some(second), criterion_1_cascading);
    gate.criterion("criterion 2 (direct klystron single world)", Some(second), criterion_2_direct);
    gate.criterion("criterion 3 (confounder ignored)", Some(second), criterion_3_confounded);
    gate.criterion("criterion 4 (reversed causality rejected)", None, criterion_4_reversed_causality);
    gate.criterion("criterion 5 (vacuum defense in depth)", None, criterion_5_vacuum_defense);
    gate.criterion(
        "criterion 6 (evaluator matches brute force, 1200 cases)",
        Some(Duration::from_secs(5)),
        criterion_6_oracle_equivalence,
    );
    gate.criterion(
        "criterion 7 (parser round trip, 1200 cases + fixture)",
        Some(Duration::from_secs(2)),
        criterion_7_parser_round_trip,
    );
    gate.criterion("criterion 8 (byte-identical reruns)", None, criterion_8_byte_identical_outputs);

    assert_eq!(
        gate.failures,
        0,
        "acceptance gate failed:\n{}",
        gate.lines.join("\n")
    );
}
