//! The Kripke model value type and its belief-update operations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AxiomSet, Formula, KernelError, Proposition};

/// Opaque world identifier. Any non-empty string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WorldId(String);

impl WorldId {
    pub fn new(id: impl Into<String>) -> Result<Self, KernelError> {
        let id = id.into();
        if id.is_empty() {
            Err(KernelError::EmptyWorldId)
        } else {
            Ok(WorldId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for WorldId {
    type Error = KernelError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        WorldId::new(s)
    }
}

impl From<WorldId> for String {
    fn from(w: WorldId) -> String {
        w.0
    }
}

/// One possible world: an id plus the set of propositions true there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub id: WorldId,
    pub valuation: BTreeSet<Proposition>,
}

impl World {
    pub fn new(id: WorldId, valuation: impl IntoIterator<Item = Proposition>) -> Self {
        World {
            id,
            valuation: valuation.into_iter().collect(),
        }
    }
}

/// A finite Kripke model anchored to a current world.
///
/// Invariants, enforced at every constructor and preserved by every
/// operation: `current` is a declared world, every accessibility edge
/// references declared worlds, and the vocabulary is a superset of the
/// union of all valuations. Iteration order is sorted everywhere, so equal
/// models serialize byte-identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelDump", into = "ModelDump")]
pub struct KripkeModel {
    worlds: BTreeMap<WorldId, BTreeSet<Proposition>>,
    // Adjacency form of the accessibility relation; every world has an entry.
    accessibility: BTreeMap<WorldId, BTreeSet<WorldId>>,
    current: WorldId,
    vocabulary: BTreeSet<Proposition>,
}

/// Where a hypothetical update lands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypothesisTarget {
    /// Update the valuation of an existing world.
    Existing(WorldId),
    /// Create a world under a caller-chosen id; error if the id is taken.
    Fresh(WorldId),
    /// Create a world under the smallest unused `w<k>` id.
    New,
}

/// One axiom failure: the labeled axiom evaluated false at this world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub world: WorldId,
}

/// Outcome of checking an axiom set against every world of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    violations: Vec<Violation>,
}

impl ValidationResult {
    /// True iff no (axiom, world) pair failed.
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// Labels of the violated axioms, deduplicated, in first-failure order.
    pub fn violated_axioms(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.violations
            .iter()
            .filter(|v| seen.insert(v.axiom.as_str()))
            .map(|v| v.axiom.as_str())
            .collect()
    }
}

/// Result of [`KripkeModel::commit`]: rejection is a normal outcome, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommitOutcome {
    Accepted(KripkeModel),
    Rejected(ValidationResult),
}

impl KripkeModel {
    pub fn new(
        worlds: impl IntoIterator<Item = World>,
        accessibility: impl IntoIterator<Item = (WorldId, WorldId)>,
        current: WorldId,
        vocabulary: impl IntoIterator<Item = Proposition>,
    ) -> Result<Self, KernelError> {
        let vocabulary: BTreeSet<Proposition> = vocabulary.into_iter().collect();
        let mut world_map = BTreeMap::new();
        for w in worlds {
            if world_map.contains_key(&w.id) {
                return Err(KernelError::DuplicateWorld(w.id.0));
            }
            for p in &w.valuation {
                if !vocabulary.contains(p) {
                    return Err(KernelError::ValuationOutsideVocabulary {
                        world: w.id.0.clone(),
                        atom: p.as_str().to_string(),
                    });
                }
            }
            world_map.insert(w.id, w.valuation);
        }
        if !world_map.contains_key(&current) {
            return Err(KernelError::UnknownWorld(current.0));
        }
        let mut adjacency: BTreeMap<WorldId, BTreeSet<WorldId>> = world_map
            .keys()
            .map(|id| (id.clone(), BTreeSet::new()))
            .collect();
        for (from, to) in accessibility {
            if !world_map.contains_key(&from) {
                return Err(KernelError::UnknownWorld(from.0));
            }
            if !world_map.contains_key(&to) {
                return Err(KernelError::UnknownWorld(to.0));
            }
            adjacency.get_mut(&from).expect("from is declared").insert(to);
        }
        Ok(KripkeModel {
            worlds: world_map,
            accessibility: adjacency,
            current,
            vocabulary,
        })
    }

    pub fn current(&self) -> &WorldId {
        &self.current
    }

    pub fn vocabulary(&self) -> &BTreeSet<Proposition> {
        &self.vocabulary
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn contains_world(&self, id: &WorldId) -> bool {
        self.worlds.contains_key(id)
    }

    pub fn world_ids(&self) -> impl Iterator<Item = &WorldId> {
        self.worlds.keys()
    }

    pub fn worlds(&self) -> impl Iterator<Item = (&WorldId, &BTreeSet<Proposition>)> {
        self.worlds.iter()
    }

    pub fn valuation(&self, id: &WorldId) -> Result<&BTreeSet<Proposition>, KernelError> {
        self.worlds
            .get(id)
            .ok_or_else(|| KernelError::UnknownWorld(id.0.clone()))
    }

    /// All accessibility edges, sorted by (from, to).
    pub fn edges(&self) -> impl Iterator<Item = (&WorldId, &WorldId)> {
        self.accessibility
            .iter()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (from, to)))
    }

    pub fn successors(&self, id: &WorldId) -> impl Iterator<Item = &WorldId> {
        self.accessibility.get(id).into_iter().flatten()
    }

    /// Evaluate a formula at a world under plain K semantics.
    ///
    /// A successor-free world satisfies `[] f` for every f (vacuous
    /// necessity) and `<> f` for none.
    pub fn eval_at(&self, world: &WorldId, f: &Formula) -> Result<bool, KernelError> {
        if !self.contains_world(world) {
            return Err(KernelError::UnknownWorld(world.0.clone()));
        }
        for atom in f.atoms() {
            if !self.vocabulary.contains(atom) {
                return Err(KernelError::AtomOutsideVocabulary(atom.as_str().to_string()));
            }
        }
        Ok(self.eval(world, f))
    }

    fn eval(&self, world: &WorldId, f: &Formula) -> bool {
        match f {
            Formula::Atom(p) => self.worlds[world].contains(p),
            Formula::Not(g) => !self.eval(world, g),
            Formula::And(a, b) => self.eval(world, a) && self.eval(world, b),
            Formula::Or(a, b) => self.eval(world, a) || self.eval(world, b),
            Formula::Implies(a, b) => !self.eval(world, a) || self.eval(world, b),
            Formula::Box(g) => self.successors(world).all(|w| self.eval(w, g)),
            Formula::Diamond(g) => self.successors(world).any(|w| self.eval(w, g)),
        }
    }

    /// Evaluate every axiom at every world (global validity).
    ///
    /// Violations hide in unreachable worlds if axioms are only checked at
    /// the current world, so the whole model is swept.
    pub fn check_axioms(&self, axioms: &AxiomSet) -> Result<ValidationResult, KernelError> {
        let mut violations = Vec::new();
        for (label, formula) in axioms.iter() {
            for atom in formula.atoms() {
                if !self.vocabulary.contains(atom) {
                    return Err(KernelError::AtomOutsideVocabulary(atom.as_str().to_string()));
                }
            }
            for world in self.worlds.keys() {
                if !self.eval(world, formula) {
                    violations.push(Violation {
                        axiom: label.to_string(),
                        world: world.clone(),
                    });
                }
            }
        }
        Ok(ValidationResult { violations })
    }

    /// Build a hypothetical update as a new model; `self` is never mutated.
    ///
    /// The target world's valuation becomes `(old ∪ add) \ remove` (old = ∅
    /// for created worlds). Returns the new model together with the id of
    /// the target world, which is the only way for a `New` caller to learn
    /// the allocated id.
    pub fn with_hypothesis(
        &self,
        target: HypothesisTarget,
        add: &BTreeSet<Proposition>,
        remove: &BTreeSet<Proposition>,
        new_edges: &[(WorldId, WorldId)],
        new_current: Option<&WorldId>,
    ) -> Result<(KripkeModel, WorldId), KernelError> {
        for p in add {
            if !self.vocabulary.contains(p) {
                return Err(KernelError::AtomOutsideVocabulary(p.as_str().to_string()));
            }
        }
        let target_id = match target {
            HypothesisTarget::Existing(id) => {
                if !self.contains_world(&id) {
                    return Err(KernelError::UnknownWorld(id.0));
                }
                id
            }
            HypothesisTarget::Fresh(id) => {
                if self.contains_world(&id) {
                    return Err(KernelError::WorldExists(id.0));
                }
                id
            }
            HypothesisTarget::New => self.fresh_world_id(),
        };

        let mut next = self.clone();
        let valuation = next.worlds.entry(target_id.clone()).or_default();
        valuation.extend(add.iter().cloned());
        // Removing an absent proposition is a no-op by set semantics.
        for p in remove {
            valuation.remove(p);
        }
        next.accessibility.entry(target_id.clone()).or_default();

        for (from, to) in new_edges {
            if !next.worlds.contains_key(from) {
                return Err(KernelError::UnknownWorld(from.0.clone()));
            }
            if !next.worlds.contains_key(to) {
                return Err(KernelError::UnknownWorld(to.0.clone()));
            }
            next.accessibility
                .get_mut(from)
                .expect("endpoint checked above")
                .insert(to.clone());
        }
        if let Some(c) = new_current {
            if !next.worlds.contains_key(c) {
                return Err(KernelError::UnknownWorld(c.0.clone()));
            }
            next.current = c.clone();
        }
        Ok((next, target_id))
    }

    /// Smallest `w<k>` not naming an existing world.
    fn fresh_world_id(&self) -> WorldId {
        for k in 0.. {
            let id = WorldId(format!("w{k}"));
            if !self.contains_world(&id) {
                return id;
            }
        }
        unreachable!("finitely many worlds")
    }

    /// Keep exactly the given worlds; edges restricted to keep × keep.
    ///
    /// Monotone: never adds worlds or edges. Pruning the current world is
    /// an error (an agent cannot disbelieve its anchor).
    pub fn prune_worlds(&self, keep: &BTreeSet<WorldId>) -> Result<KripkeModel, KernelError> {
        for id in keep {
            if !self.contains_world(id) {
                return Err(KernelError::UnknownWorld(id.0.clone()));
            }
        }
        if !keep.contains(&self.current) {
            return Err(KernelError::PruneCurrent(self.current.0.clone()));
        }
        let worlds = self
            .worlds
            .iter()
            .filter(|(id, _)| keep.contains(id))
            .map(|(id, v)| (id.clone(), v.clone()))
            .collect();
        let accessibility = self
            .accessibility
            .iter()
            .filter(|(id, _)| keep.contains(id))
            .map(|(id, tos)| {
                let tos = tos.iter().filter(|t| keep.contains(*t)).cloned().collect();
                (id.clone(), tos)
            })
            .collect();
        Ok(KripkeModel {
            worlds,
            accessibility,
            current: self.current.clone(),
            vocabulary: self.vocabulary.clone(),
        })
    }

    /// Accept the candidate as the new committed belief iff it passes the
    /// axioms; otherwise report the violations and keep using `self`.
    pub fn commit(
        &self,
        candidate: KripkeModel,
        axioms: &AxiomSet,
    ) -> Result<CommitOutcome, KernelError> {
        let result = candidate.check_axioms(axioms)?;
        if result.ok() {
            Ok(CommitOutcome::Accepted(candidate))
        } else {
            Ok(CommitOutcome::Rejected(result))
        }
    }

    /// Canonical pretty JSON: sorted worlds, sorted edge list, sorted
    /// vocabulary. Equal models produce byte-identical output.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serialization is total");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, KernelError> {
        serde_json::from_str(text).map_err(|e| KernelError::InvalidModelJson(e.to_string()))
    }
}

/// Serialized form of a model; field order is the canonical key order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDump {
    pub worlds: BTreeMap<String, Vec<String>>,
    pub accessibility: Vec<(String, String)>,
    pub current: String,
    pub vocabulary: Vec<String>,
}

impl From<KripkeModel> for ModelDump {
    fn from(m: KripkeModel) -> ModelDump {
        ModelDump {
            worlds: m
                .worlds
                .iter()
                .map(|(id, v)| (id.0.clone(), v.iter().map(|p| p.as_str().to_string()).collect()))
                .collect(),
            accessibility: m
                .edges()
                .map(|(a, b)| (a.0.clone(), b.0.clone()))
                .collect(),
            current: m.current.0,
            vocabulary: m.vocabulary.iter().map(|p| p.as_str().to_string()).collect(),
        }
    }
}

impl TryFrom<ModelDump> for KripkeModel {
    type Error = KernelError;

    fn try_from(d: ModelDump) -> Result<Self, Self::Error> {
        let worlds = d
            .worlds
            .into_iter()
            .map(|(id, props)| {
                let id = WorldId::new(id)?;
                let valuation = props
                    .into_iter()
                    .map(Proposition::new)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(World::new(id, valuation))
            })
            .collect::<Result<Vec<_>, KernelError>>()?;
        let accessibility = d
            .accessibility
            .into_iter()
            .map(|(a, b)| Ok((WorldId::new(a)?, WorldId::new(b)?)))
            .collect::<Result<Vec<_>, KernelError>>()?;
        let current = WorldId::new(d.current)?;
        let vocabulary = d
            .vocabulary
            .into_iter()
            .map(Proposition::new)
            .collect::<Result<Vec<_>, _>>()?;
        KripkeModel::new(worlds, accessibility, current, vocabulary)
    }
}
