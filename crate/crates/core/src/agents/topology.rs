//! The topology knowledge agent: a static, factual graph of the sector's
//! physical layout, answering undirected connectivity queries.
//!
//! Connectivity is necessary for a causal claim, never sufficient: a
//! colocated edge connects components without implying causation, and it
//! is the axioms and the theorizer's precedence rules that reject
//! non-causal links.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::sim::PvId;

use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Cools,
    Powers,
    Colocated,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Cools => "cools",
            Relation::Powers => "powers",
            Relation::Colocated => "colocated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyEdge {
    pub from: String,
    pub to: String,
    pub relation: Relation,
}

impl fmt::Display for TopologyEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -[{}]-> {}", self.from, self.relation, self.to)
    }
}

/// The static sector layout: components, typed edges, and which component
/// owns each telemetry channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopologyDump", into = "TopologyDump")]
pub struct TopologyGraph {
    components: BTreeSet<String>,
    edges: Vec<TopologyEdge>,
    pv_owner: BTreeMap<PvId, String>,
}

#[derive(Serialize, Deserialize)]
struct TopologyDump {
    components: BTreeSet<String>,
    edges: Vec<TopologyEdge>,
    pv_owner: BTreeMap<PvId, String>,
}

impl TryFrom<TopologyDump> for TopologyGraph {
    type Error = AgentError;

    fn try_from(d: TopologyDump) -> Result<Self, Self::Error> {
        TopologyGraph::new(d.components, d.edges, d.pv_owner)
    }
}

impl From<TopologyGraph> for TopologyDump {
    fn from(g: TopologyGraph) -> Self {
        TopologyDump {
            components: g.components,
            edges: g.edges,
            pv_owner: g.pv_owner,
        }
    }
}

const BUILTIN_TOPOLOGY: &str = include_str!("../../../../fixtures/topology.json");

impl TopologyGraph {
    pub fn new(
        components: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = TopologyEdge>,
        pv_owner: impl IntoIterator<Item = (PvId, String)>,
    ) -> Result<Self, AgentError> {
        let components: BTreeSet<String> = components.into_iter().collect();
        let edges: Vec<TopologyEdge> = edges.into_iter().collect();
        let pv_owner: BTreeMap<PvId, String> = pv_owner.into_iter().collect();
        for edge in &edges {
            for end in [&edge.from, &edge.to] {
                if !components.contains(end) {
                    return Err(AgentError::InvalidTopology(format!(
                        "edge {edge} references unknown component {end:?}"
                    )));
                }
            }
        }
        for (pv, owner) in &pv_owner {
            if !components.contains(owner) {
                return Err(AgentError::InvalidTopology(format!(
                    "pv {pv} is owned by unknown component {owner:?}"
                )));
            }
        }
        Ok(TopologyGraph {
            components,
            edges,
            pv_owner,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, AgentError> {
        serde_json::from_str(text).map_err(|e| AgentError::InvalidTopology(e.to_string()))
    }

    /// The sector fixture shipped with the binary.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_TOPOLOGY).expect("builtin topology fixture is valid")
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.components.iter().map(String::as_str)
    }

    pub fn edges(&self) -> &[TopologyEdge] {
        &self.edges
    }

    pub fn owner_of(&self, pv: &PvId) -> Option<&str> {
        self.pv_owner.get(pv).map(String::as_str)
    }

    /// Compact JSON picture for prompting a remote model.
    pub fn sketch(&self) -> Value {
        json!({
            "components": self.components,
            "edges": self
                .edges
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>(),
        })
    }
}

/// Answer to a connectivity query; `path` is the edge walk when connected
/// (empty for a component queried against itself).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityAnswer {
    pub connected: bool,
    pub path: Vec<TopologyEdge>,
}

/// Undirected breadth-first reachability over the typed edges; a pure
/// function of the static graph, deterministic because neighbors are
/// visited in sorted order.
pub fn query_connectivity(
    topo: &TopologyGraph,
    a: &str,
    b: &str,
) -> Result<ConnectivityAnswer, AgentError> {
    for name in [a, b] {
        if !topo.components.contains(name) {
            return Err(AgentError::UnknownComponent(name.to_string()));
        }
    }
    if a == b {
        return Ok(ConnectivityAnswer {
            connected: true,
            path: Vec::new(),
        });
    }

    // Neighbor map with the traversal stored as the original typed edge.
    let mut adjacency: BTreeMap<&str, BTreeMap<&str, &TopologyEdge>> = BTreeMap::new();
    for edge in &topo.edges {
        adjacency
            .entry(edge.from.as_str())
            .or_default()
            .entry(edge.to.as_str())
            .or_insert(edge);
        adjacency
            .entry(edge.to.as_str())
            .or_default()
            .entry(edge.from.as_str())
            .or_insert(edge);
    }

    let mut came_from: BTreeMap<&str, (&str, &TopologyEdge)> = BTreeMap::new();
    let mut queue = VecDeque::from([a]);
    let mut seen = BTreeSet::from([a]);
    while let Some(node) = queue.pop_front() {
        if node == b {
            break;
        }
        if let Some(neighbors) = adjacency.get(node) {
            for (&next, &edge) in neighbors {
                if seen.insert(next) {
                    came_from.insert(next, (node, edge));
                    queue.push_back(next);
                }
            }
        }
    }

    if !came_from.contains_key(b) {
        return Ok(ConnectivityAnswer {
            connected: false,
            path: Vec::new(),
        });
    }
    let mut path = Vec::new();
    let mut node = b;
    while node != a {
        let (previous, edge) = came_from[node];
        path.push(edge.clone());
        node = previous;
    }
    path.reverse();
    Ok(ConnectivityAnswer {
        connected: true,
        path,
    })
}
