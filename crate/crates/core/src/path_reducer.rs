//! Attack graph reduction: merge derivations that reach the same outcome
//! through a different intermediate host or CVE, keeping exactly one.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ag_engine::{DerivationGraph, GraphNode, NodeKind};
use crate::fact_model::Fact;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("reduction policy: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("policy for {predicate:?} names argument position {position} beyond arity hints")]
    BadPosition { predicate: String, position: usize },
}

/// Which argument positions of a predicate carry the interchangeable host or
/// CVE identity. Two atoms of the predicate that agree everywhere else are
/// the same outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicatePolicy {
    pub merge_positions: Vec<usize>,
}

/// Per-predicate merge declarations plus an optional seed that permutes which
/// equivalent branch survives. No seed means lexicographic pick.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPolicy {
    #[serde(default)]
    pub predicates: BTreeMap<String, PredicatePolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReductionPolicy {
    pub fn from_json(text: &str) -> Result<Self, PolicyError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Mask the merge positions of an atom: the result is the outcome class.
    fn masked(&self, atom: &Fact) -> Fact {
        let mut masked = atom.clone();
        if let Some(policy) = self.predicates.get(&atom.predicate) {
            for &pos in &policy.merge_positions {
                if let Some(slot) = masked.args.get_mut(pos) {
                    *slot = "_".into();
                }
            }
        }
        masked
    }

    /// The arguments hidden by the mask, in position order: the tie-break key.
    fn merge_key(&self, atom: &Fact) -> Vec<String> {
        let mut key = Vec::new();
        if let Some(policy) = self.predicates.get(&atom.predicate) {
            for &pos in &policy.merge_positions {
                if let Some(arg) = atom.args.get(pos) {
                    key.push(arg.clone());
                }
            }
        }
        key
    }
}

/// Signature under which two rule applications of the same conclusion count
/// as redundant variants of each other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct AppSignature {
    rule: String,
    masked_premises: Vec<Fact>,
}

/// Reduce the graph: walking down from each goal, alternative applications of
/// one derived atom that share a rule and differ only at declared host/CVE
/// positions collapse to a single survivor. Everything the survivors need is
/// kept; nothing else is.
pub fn reduce_graph(graph: &DerivationGraph, policy: &ReductionPolicy) -> DerivationGraph {
    if graph.is_empty() {
        return graph.clone();
    }
    let preds = graph.predecessors();

    let mut keep: BTreeSet<usize> = BTreeSet::new();
    let mut keep_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut stack: Vec<usize> = graph.goals.clone();

    while let Some(derived) = stack.pop() {
        if !keep.insert(derived) {
            continue;
        }
        if graph.node(derived).kind != NodeKind::Derived {
            continue;
        }

        // group this atom's applications by masked signature
        let mut groups: BTreeMap<AppSignature, Vec<usize>> = BTreeMap::new();
        for &app in &preds[&derived] {
            let premises: Vec<&GraphNode> =
                preds[&app].iter().map(|p| graph.node(*p)).collect();
            let masked_premises = premises
                .iter()
                .filter_map(|p| p.atom.as_ref())
                .map(|a| policy.masked(a))
                .collect();
            groups
                .entry(AppSignature {
                    rule: graph.node(app).label.clone(),
                    masked_premises,
                })
                .or_default()
                .push(app);
        }

        for (signature, mut apps) in groups {
            apps.sort_by_cached_key(|app| {
                let key: Vec<Vec<String>> = preds[app]
                    .iter()
                    .filter_map(|p| graph.node(*p).atom.as_ref())
                    .map(|a| policy.merge_key(a))
                    .collect();
                (key, *app)
            });
            let winner = match policy.seed {
                None => apps[0],
                Some(seed) => {
                    let mut hasher = DefaultHasher::new();
                    signature.hash(&mut hasher);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ hasher.finish());
                    apps[rng.gen_range(0..apps.len())]
                }
            };
            keep.insert(winner);
            keep_edges.insert((winner, derived));
            for &premise in &preds[&winner] {
                keep_edges.insert((premise, winner));
                match graph.node(premise).kind {
                    NodeKind::Fact => {
                        keep.insert(premise);
                    }
                    _ => stack.push(premise),
                }
            }
        }
    }

    // renumber densely, preserving the original relative order
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(keep.len());
    for old_id in &keep {
        let mut node = graph.node(*old_id).clone();
        node.id = remap.len() + 1;
        remap.insert(*old_id, node.id);
        nodes.push(node);
    }
    let edges = graph
        .edges
        .iter()
        .filter(|e| keep_edges.contains(e))
        .map(|(a, b)| (remap[a], remap[b]))
        .collect();
    let goals = graph.goals.iter().map(|g| remap[g]).collect();

    DerivationGraph {
        nodes,
        edges,
        goals,
    }
}
