//! The remote language-model backend.
//!
//! The wire protocol is a chat-style HTTP JSON endpoint. The model is
//! never trusted: replies must be constrained JSON over the closed
//! vocabulary, anything else burns a retry, and after the retry budget the
//! generator falls back to the rule tables. Downstream code therefore only
//! ever sees vocabulary-checked values.

use std::time::Duration;

use serde_json::{json, Value};

use crate::agents::{FaultReport, TopologyGraph};
use crate::kernel::Proposition;
use crate::vocab;

use super::rules::{rule_classify, rule_theorize};
use super::{
    AnomalyContext, CausalTheory, Classification, HypothesisError, HypothesisGenerator,
    LmParseError, Source, SystemClass,
};

const CLASSIFY_PROMPT: &str = include_str!("../../../../prompts/classify_system.txt");
const THEORIZE_PROMPT: &str = include_str!("../../../../prompts/theorize_system.txt");

/// Environment variable naming the chat-completion endpoint URL.
pub const ENDPOINT_VAR: &str = "MODALGUARD_LM_ENDPOINT";
/// Environment variable holding the bearer token, if the endpoint needs one.
pub const TOKEN_VAR: &str = "MODALGUARD_LM_TOKEN";
/// Environment variable naming the model; defaults to "default".
pub const MODEL_VAR: &str = "MODALGUARD_LM_MODEL";

/// A blocking completion transport, mockable in tests.
pub trait LmTransport {
    fn complete(&mut self, system: &str, user: &str) -> Result<String, HypothesisError>;
}

/// Talks to an OpenAI-style chat endpoint with temperature 0.
pub struct HttpTransport {
    endpoint: String,
    token: Option<String>,
    model: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, token: Option<String>, model: impl Into<String>) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(10)))
            .build();
        HttpTransport {
            endpoint: endpoint.into(),
            token,
            model: model.into(),
            agent: config.into(),
        }
    }

    /// Reads MODALGUARD_LM_ENDPOINT / _TOKEN / _MODEL; the endpoint is
    /// mandatory.
    pub fn from_env() -> Result<Self, HypothesisError> {
        let endpoint =
            std::env::var(ENDPOINT_VAR).map_err(|_| HypothesisError::MissingEndpoint)?;
        let token = std::env::var(TOKEN_VAR).ok();
        let model = std::env::var(MODEL_VAR).unwrap_or_else(|_| "default".to_string());
        Ok(HttpTransport::new(endpoint, token, model))
    }
}

impl LmTransport for HttpTransport {
    fn complete(&mut self, system: &str, user: &str) -> Result<String, HypothesisError> {
        let payload = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let mut request = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "application/json");
        if let Some(token) = &self.token {
            request = request.header("authorization", &format!("Bearer {token}"));
        }
        let mut response = request
            .send(payload.to_string())
            .map_err(|e| HypothesisError::Transport(e.to_string()))?;
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| HypothesisError::Transport(e.to_string()))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| HypothesisError::Transport(format!("non-JSON reply: {e}")))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| {
                HypothesisError::Transport("reply lacks choices[0].message.content".to_string())
            })
    }
}

/// Strip at most one fenced code block (with or without a language tag).
fn strip_fence(text: &str) -> &str {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("```") {
        if let Some(newline) = rest.find('\n') {
            let inner = &rest[newline + 1..];
            if let Some(end) = inner.rfind("```") {
                return inner[..end].trim();
            }
        }
    }
    trimmed
}

/// Parse a classification reply: a JSON object whose `suspected_system`
/// is one of the four vocabulary strings, nothing more lenient.
pub fn parse_lm_response(text: &str) -> Result<Classification, LmParseError> {
    let body = strip_fence(text);
    let value: Value =
        serde_json::from_str(body).map_err(|e| LmParseError::MalformedJson(e.to_string()))?;
    let object = value.as_object().ok_or(LmParseError::NotAnObject)?;
    let raw = object
        .get("suspected_system")
        .ok_or(LmParseError::MissingKey("suspected_system"))?;
    let name = raw
        .as_str()
        .ok_or_else(|| LmParseError::OutOfVocabulary(raw.to_string()))?;
    let suspected_system = match name {
        "Cooling" => SystemClass::Cooling,
        "Power" => SystemClass::Power,
        "Vacuum" => SystemClass::Vacuum,
        "Klystron" => SystemClass::Klystron,
        other => return Err(LmParseError::OutOfVocabulary(other.to_string())),
    };
    Ok(Classification {
        suspected_system,
        source: Source::Remote,
        raw_response: None,
    })
}

/// Parse a theory reply: `root_cause` and `effects` over the belief
/// vocabulary, root not among effects, optional `narrative`.
pub fn parse_theory_response(text: &str) -> Result<CausalTheory, LmParseError> {
    let body = strip_fence(text);
    let value: Value =
        serde_json::from_str(body).map_err(|e| LmParseError::MalformedJson(e.to_string()))?;
    let object = value.as_object().ok_or(LmParseError::NotAnObject)?;

    let vocabulary = vocab::belief_vocabulary();
    let proposition = |v: &Value| -> Result<Proposition, LmParseError> {
        let name = v
            .as_str()
            .ok_or_else(|| LmParseError::OutOfVocabulary(v.to_string()))?;
        let p = Proposition::new(name)
            .map_err(|_| LmParseError::OutOfVocabulary(name.to_string()))?;
        if !vocabulary.contains(&p) {
            return Err(LmParseError::OutOfVocabulary(name.to_string()));
        }
        Ok(p)
    };

    let root_cause = proposition(
        object
            .get("root_cause")
            .ok_or(LmParseError::MissingKey("root_cause"))?,
    )?;
    let effects_value = object
        .get("effects")
        .ok_or(LmParseError::MissingKey("effects"))?;
    let effects_list = effects_value
        .as_array()
        .ok_or_else(|| LmParseError::Inconsistent("effects is not an array".to_string()))?;
    let mut effects = Vec::with_capacity(effects_list.len());
    for v in effects_list {
        effects.push(proposition(v)?);
    }
    if effects.contains(&root_cause) {
        return Err(LmParseError::Inconsistent(format!(
            "root cause {root_cause} listed among its own effects"
        )));
    }
    let narrative = object
        .get("narrative")
        .and_then(Value::as_str)
        .unwrap_or("remote theory, no narrative given")
        .to_string();
    Ok(CausalTheory {
        root_cause,
        effects,
        narrative,
    })
}

/// Remote generator with retry budget and rule fallback.
pub struct RemoteGenerator<T: LmTransport> {
    transport: T,
    retries: u32,
}

impl<T: LmTransport> RemoteGenerator<T> {
    pub fn new(transport: T) -> Self {
        RemoteGenerator {
            transport,
            retries: 2,
        }
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }
}

impl RemoteGenerator<HttpTransport> {
    pub fn from_env() -> Result<Self, HypothesisError> {
        Ok(RemoteGenerator::new(HttpTransport::from_env()?))
    }
}

impl<T: LmTransport> HypothesisGenerator for RemoteGenerator<T> {
    fn classify(&mut self, ctx: &AnomalyContext) -> Result<Classification, HypothesisError> {
        let user = serde_json::to_string_pretty(ctx).expect("context serialization is total");
        let mut last_raw = None;
        for attempt in 0..=self.retries {
            match self.transport.complete(CLASSIFY_PROMPT, &user) {
                Ok(reply) => {
                    last_raw = Some(reply.clone());
                    match parse_lm_response(&reply) {
                        Ok(mut classification) => {
                            classification.raw_response = Some(reply);
                            return Ok(classification);
                        }
                        Err(e) => log::warn!("classify attempt {attempt}: {e}"),
                    }
                }
                Err(e) => log::warn!("classify attempt {attempt}: {e}"),
            }
        }
        log::warn!("remote classification exhausted retries; using the rule table");
        rule_classify(ctx).map(|suspected_system| Classification {
            suspected_system,
            source: Source::Rule,
            raw_response: last_raw,
        })
    }

    fn theorize(
        &mut self,
        reports: &[FaultReport],
        topology_hint: Option<&TopologyGraph>,
    ) -> Result<CausalTheory, HypothesisError> {
        if reports.is_empty() {
            return Err(HypothesisError::NoReports);
        }
        let vocabulary = vocab::belief_vocabulary()
            .iter()
            .map(|p| p.as_str().to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let system = THEORIZE_PROMPT.replace("{{vocabulary}}", &vocabulary);

        let serialized_reports: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "agent": r.agent(),
                    "tick": r.tick(),
                    "pv": r.pv().as_str(),
                    "proposition": r.proposition().as_str(),
                })
            })
            .collect();
        let mut user_value = json!({ "reports": serialized_reports });
        if let Some(topo) = topology_hint {
            user_value["topology"] = topo.sketch();
        }
        let user =
            serde_json::to_string_pretty(&user_value).expect("report serialization is total");

        for attempt in 0..=self.retries {
            match self.transport.complete(&system, &user) {
                Ok(reply) => match parse_theory_response(&reply) {
                    Ok(theory) => return Ok(theory),
                    Err(e) => log::warn!("theorize attempt {attempt}: {e}"),
                },
                Err(e) => log::warn!("theorize attempt {attempt}: {e}"),
            }
        }
        log::warn!("remote theorizing exhausted retries; using the rule table");
        rule_theorize(reports)
    }
}
