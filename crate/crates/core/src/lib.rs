//! Fault diagnosis for a simulated particle-accelerator sector.
//!
//! Agents hold their beliefs as finite Kripke models. Component monitors
//! watch simulated process variables and report anomalies; a hypothesis
//! generator (rule table or remote language model) classifies them into
//! fault propositions and causal theories; the reasoner formalizes each
//! theory as a hypothetical model update and commits it only after the
//! update passes the guardrail axioms and a physical-topology check.

pub mod agents;
pub mod cli;
pub mod hypothesis;
pub mod kernel;
pub mod sim;
pub mod syntax;
pub mod vocab;
