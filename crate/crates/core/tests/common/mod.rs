//! Shared test helpers: an independent reference evaluator plus seeded
//! random generators for models and formulas.
//!
//! The reference evaluator re-implements Kripke semantics from scratch over
//! a plain vector representation. It shares no code with the library's
//! evaluator, so agreement between the two is evidence, not tautology.

#![allow(dead_code)] // each integration test binary uses a different subset

use std::collections::BTreeSet;

use modalguard::kernel::{Formula, KripkeModel, Proposition, World, WorldId};
use rand::Rng;

/// Plain-vector model mirror for the reference evaluator.
pub struct RefModel {
    pub worlds: Vec<(String, Vec<String>)>,
    pub edges: Vec<(String, String)>,
}

/// Brute-force semantics: linear scans and explicit successor enumeration.
pub fn ref_eval(m: &RefModel, world: &str, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => m
            .worlds
            .iter()
            .find(|(id, _)| id == world)
            .map(|(_, val)| val.iter().any(|v| v == p.as_str()))
            .unwrap_or(false),
        Formula::Not(g) => !ref_eval(m, world, g),
        Formula::And(a, b) => ref_eval(m, world, a) && ref_eval(m, world, b),
        Formula::Or(a, b) => ref_eval(m, world, a) || ref_eval(m, world, b),
        Formula::Implies(a, b) => !ref_eval(m, world, a) || ref_eval(m, world, b),
        Formula::Box(g) => successors(m, world).iter().all(|s| ref_eval(m, s, g)),
        Formula::Diamond(g) => successors(m, world).iter().any(|s| ref_eval(m, s, g)),
    }
}

fn successors(m: &RefModel, world: &str) -> Vec<String> {
    m.edges
        .iter()
        .filter(|(from, _)| from == world)
        .map(|(_, to)| to.clone())
        .collect()
}

pub const TEST_VOCAB: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

pub fn prop(name: &str) -> Proposition {
    Proposition::new(name).unwrap()
}

pub fn wid(id: &str) -> WorldId {
    WorldId::new(id).unwrap()
}

/// Random model with 1..=max_worlds worlds over the test vocabulary,
/// together with its reference mirror. Edge density 0.35, atom density 0.5.
pub fn gen_model(rng: &mut impl Rng, max_worlds: usize) -> (KripkeModel, RefModel) {
    let n = rng.random_range(1..=max_worlds);
    let ids: Vec<String> = (0..n).map(|k| format!("w{k}")).collect();
    let mut worlds = Vec::new();
    let mut ref_worlds = Vec::new();
    for id in &ids {
        let val: Vec<&str> = TEST_VOCAB
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .copied()
            .collect();
        ref_worlds.push((id.clone(), val.iter().map(|s| s.to_string()).collect()));
        worlds.push(World::new(wid(id), val.iter().map(|s| prop(s))));
    }
    let mut edges = Vec::new();
    let mut ref_edges = Vec::new();
    for from in &ids {
        for to in &ids {
            if rng.random_bool(0.35) {
                edges.push((wid(from), wid(to)));
                ref_edges.push((from.clone(), to.clone()));
            }
        }
    }
    let current = ids[rng.random_range(0..n)].clone();
    let model = KripkeModel::new(
        worlds,
        edges,
        wid(&current),
        TEST_VOCAB.iter().map(|s| prop(s)),
    )
    .unwrap();
    (
        model,
        RefModel {
            worlds: ref_worlds,
            edges: ref_edges,
        },
    )
}

/// Random formula of at most the given depth over the test vocabulary.
pub fn gen_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    let leaf = depth == 0 || rng.random_bool(0.2);
    if leaf {
        let name = TEST_VOCAB[rng.random_range(0..TEST_VOCAB.len())];
        return Formula::atom(prop(name));
    }
    match rng.random_range(0..6) {
        0 => Formula::not(gen_formula(rng, depth - 1)),
        1 => Formula::and(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1)),
        2 => Formula::or(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1)),
        3 => Formula::implies(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1)),
        4 => Formula::necessarily(gen_formula(rng, depth - 1)),
        _ => Formula::possibly(gen_formula(rng, depth - 1)),
    }
}

/// Random world id drawn from the model.
pub fn pick_world(rng: &mut impl Rng, model: &KripkeModel) -> WorldId {
    let ids: Vec<&WorldId> = model.world_ids().collect();
    ids[rng.random_range(0..ids.len())].clone()
}

/// Random subset of the model's worlds that always contains the current
/// world (a legal prune target).
pub fn pick_keep_set(rng: &mut impl Rng, model: &KripkeModel) -> BTreeSet<WorldId> {
    let mut keep: BTreeSet<WorldId> = model
        .world_ids()
        .filter(|_| rng.random_bool(0.5))
        .cloned()
        .collect();
    keep.insert(model.current().clone());
    keep
}
