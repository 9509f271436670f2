//! The remote backend against a scripted transport: retry policy, strict
//! reply validation, and the rule fallback that keeps diagnosis total.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::rc::Rc;

use modalguard::agents::{FaultReport, TopologyGraph};
use modalguard::hypothesis::{
    AnomalyContext, Classification, HypothesisError, HypothesisGenerator, LmTransport,
    RemoteGenerator, Source, SystemClass,
};
use modalguard::sim::PvId;
use modalguard::vocab;

#[derive(Default)]
struct Script {
    replies: VecDeque<Result<String, String>>,
    calls: Vec<(String, String)>,
}

#[derive(Clone, Default)]
struct MockTransport(Rc<RefCell<Script>>);

impl MockTransport {
    fn replying(replies: impl IntoIterator<Item = Result<&'static str, &'static str>>) -> Self {
        let script = Script {
            replies: replies
                .into_iter()
                .map(|r| r.map(str::to_string).map_err(str::to_string))
                .collect(),
            calls: Vec::new(),
        };
        MockTransport(Rc::new(RefCell::new(script)))
    }

    fn calls(&self) -> Vec<(String, String)> {
        self.0.borrow().calls.clone()
    }
}

impl LmTransport for MockTransport {
    fn complete(&mut self, system: &str, user: &str) -> Result<String, HypothesisError> {
        let mut script = self.0.borrow_mut();
        script.calls.push((system.to_string(), user.to_string()));
        match script.replies.pop_front() {
            Some(Ok(reply)) => Ok(reply),
            Some(Err(e)) => Err(HypothesisError::Transport(e)),
            None => Err(HypothesisError::Transport("script exhausted".to_string())),
        }
    }
}

fn anomaly() -> AnomalyContext {
    AnomalyContext::new(PvId::new("RF:cavity_temp").unwrap(), 4, 40.0, 35.0)
}

fn klystron_reports() -> Vec<FaultReport> {
    let ctx = AnomalyContext::new(PvId::new("RF:klystron_output").unwrap(), 3, 3.8, 5.0);
    let c = Classification {
        suspected_system: SystemClass::Klystron,
        source: Source::Rule,
        raw_response: None,
    };
    vec![FaultReport::new("Klystron_Agent", 3, c, ctx)]
}

#[test]
fn first_valid_reply_wins() {
    let transport = MockTransport::replying([Ok(r#"{"suspected_system": "Cooling"}"#)]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let c = gen.classify(&anomaly()).unwrap();
    assert_eq!(c.suspected_system, SystemClass::Cooling);
    assert_eq!(c.source, Source::Remote);
    assert_eq!(c.raw_response.as_deref(), Some(r#"{"suspected_system": "Cooling"}"#));
    assert_eq!(transport.calls().len(), 1);
}

#[test]
fn bad_replies_burn_retries_until_a_good_one() {
    let transport = MockTransport::replying([
        Ok("the fault is thermal, probably"),
        Ok(r#"{"suspected_system": "Thermal"}"#),
        Ok(r#"{"suspected_system": "Klystron"}"#),
    ]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let c = gen.classify(&anomaly()).unwrap();
    assert_eq!(c.suspected_system, SystemClass::Klystron);
    assert_eq!(c.source, Source::Remote);
    assert_eq!(transport.calls().len(), 3);
}

#[test]
fn exhausted_retries_fall_back_to_the_rule_table() {
    let transport = MockTransport::replying([
        Ok(r#"{"suspected_system": "Thermal"}"#),
        Ok(r#"{"suspected_system": "Magnetics"}"#),
        Ok("no"),
    ]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let c = gen.classify(&anomaly()).unwrap();
    // Hot cavity, so the rule table says Cooling; the last raw reply is
    // kept for audit and the source records the fallback.
    assert_eq!(c.suspected_system, SystemClass::Cooling);
    assert_eq!(c.source, Source::Rule);
    assert_eq!(c.raw_response.as_deref(), Some("no"));
    assert_eq!(transport.calls().len(), 3);
}

#[test]
fn transport_failures_also_fall_back() {
    let transport = MockTransport::replying([
        Err("connection refused"),
        Err("connection refused"),
        Err("connection refused"),
    ]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let c = gen.classify(&anomaly()).unwrap();
    assert_eq!(c.suspected_system, SystemClass::Cooling);
    assert_eq!(c.source, Source::Rule);
    assert_eq!(c.raw_response, None);
}

#[test]
fn retry_budget_is_configurable() {
    let transport = MockTransport::replying([Ok("junk")]);
    let mut gen = RemoteGenerator::new(transport.clone()).with_retries(0);
    let c = gen.classify(&anomaly()).unwrap();
    assert_eq!(transport.calls().len(), 1);
    assert_eq!(c.source, Source::Rule);
}

#[test]
fn unclassifiable_fallback_surfaces_the_rule_error() {
    let transport = MockTransport::replying([Ok("junk")]);
    let mut gen = RemoteGenerator::new(transport).with_retries(0);
    let ctx = AnomalyContext::new(PvId::new("MAG:current").unwrap(), 1, 2.0, 1.0);
    assert!(matches!(
        gen.classify(&ctx),
        Err(HypothesisError::Unclassifiable { .. })
    ));
}

#[test]
fn classify_prompts_carry_the_contract_and_the_anomaly() {
    let transport = MockTransport::replying([Ok(r#"{"suspected_system": "Cooling"}"#)]);
    let mut gen = RemoteGenerator::new(transport.clone());
    gen.classify(&anomaly()).unwrap();
    let (system, user) = transport.calls().remove(0);
    assert!(system.contains("suspected_system"));
    assert!(system.contains("\"Klystron\""));
    assert!(user.contains("RF:cavity_temp"));
    assert!(user.contains("above"));
}

#[test]
fn valid_remote_theories_are_adopted() {
    let transport = MockTransport::replying([Ok(
        r#"{"root_cause": "klystron_fault_reported", "effects": ["rf_power_fault_reported"], "narrative": "one fault"}"#,
    )]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let theory = gen.theorize(&klystron_reports(), None).unwrap();
    assert_eq!(theory.root_cause, vocab::klystron_fault_reported());
    assert_eq!(theory.effects, vec![vocab::rf_power_fault_reported()]);
    assert_eq!(theory.narrative, "one fault");
}

#[test]
fn invalid_remote_theories_fall_back_to_the_rules() {
    let transport = MockTransport::replying([
        Ok(r#"{"root_cause": "gremlins", "effects": []}"#),
        Ok(r#"{"root_cause": "klystron_fault_reported", "effects": ["klystron_fault_reported"]}"#),
        Ok(r#"{"root_cause": "klystron_fault_reported"}"#),
    ]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let theory = gen.theorize(&klystron_reports(), None).unwrap();
    // Rule fallback on a single klystron report: lone root, no effects.
    assert_eq!(theory.root_cause, vocab::klystron_fault_reported());
    assert!(theory.effects.is_empty());
    assert_eq!(transport.calls().len(), 3);
}

#[test]
fn theorize_prompts_embed_vocabulary_reports_and_topology() {
    let transport = MockTransport::replying([Ok(
        r#"{"root_cause": "klystron_fault_reported", "effects": []}"#,
    )]);
    let mut gen = RemoteGenerator::new(transport.clone());
    let topo = TopologyGraph::builtin();
    gen.theorize(&klystron_reports(), Some(&topo)).unwrap();
    let (system, user) = transport.calls().remove(0);
    assert!(!system.contains("{{vocabulary}}"), "placeholder must be filled");
    assert!(system.contains("cooling_fault_reported"));
    assert!(system.contains("rf_fault_is_root_cause"));
    assert!(user.contains("Klystron_Agent"));
    assert!(user.contains("RF:klystron_output"));
    assert!(user.contains("klystron_1 -[powers]-> rf_cavity_1"));
}

#[test]
fn empty_report_sets_never_reach_the_transport() {
    let transport = MockTransport::replying([]);
    let mut gen = RemoteGenerator::new(transport.clone());
    assert!(matches!(
        gen.theorize(&[], None),
        Err(HypothesisError::NoReports)
    ));
    assert!(transport.calls().is_empty());
}
