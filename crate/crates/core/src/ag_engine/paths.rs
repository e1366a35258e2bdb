//! Attack path enumeration: every way of choosing one rule application per
//! derived atom yields one concrete path through the AND/OR graph.

use std::collections::BTreeMap;

use super::graph::{DerivationGraph, NodeKind};

/// One concrete attack path: a goal, one chosen application per derived node
/// in its support, and the facts those applications consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackPath {
    /// Goal node id this path derives.
    pub goal: usize,
    /// Every node id on the path (derived, application and fact nodes).
    pub nodes: Vec<usize>,
    /// Derived node ids in dependency order, the goal last.
    pub steps: Vec<usize>,
    /// Chosen application per derived node.
    pub choice: BTreeMap<usize, usize>,
    /// Length of the longest derivation chain minus one.
    pub hops: usize,
}

/// Keep enumeration bounded on graphs with many alternatives.
const MAX_PATHS_PER_GOAL: usize = 1024;

/// Enumerate attack paths for every goal, deterministically ordered by the
/// node numbering of the graph.
pub fn enumerate_attack_paths(graph: &DerivationGraph) -> Vec<AttackPath> {
    let preds = graph.predecessors();
    let mut out = Vec::new();
    for goal in &graph.goals {
        if graph.node(*goal).kind != NodeKind::Derived {
            continue;
        }
        let mut found = Vec::new();
        explore(graph, &preds, vec![*goal], BTreeMap::new(), &mut found);
        for choice in found {
            out.push(finalize(graph, &preds, *goal, choice));
        }
    }
    out
}

fn explore(
    graph: &DerivationGraph,
    preds: &BTreeMap<usize, Vec<usize>>,
    mut pending: Vec<usize>,
    choice: BTreeMap<usize, usize>,
    out: &mut Vec<BTreeMap<usize, usize>>,
) {
    if out.len() >= MAX_PATHS_PER_GOAL {
        return;
    }
    let derived = loop {
        match pending.pop() {
            None => {
                out.push(choice);
                return;
            }
            Some(d) if choice.contains_key(&d) => continue,
            Some(d) => break d,
        }
    };
    let mut apps: Vec<usize> = preds[&derived]
        .iter()
        .copied()
        .filter(|p| graph.node(*p).kind == NodeKind::RuleApp)
        .collect();
    apps.sort_unstable();
    for app in apps {
        let mut next_pending = pending.clone();
        for premise in &preds[&app] {
            if graph.node(*premise).kind == NodeKind::Derived {
                next_pending.push(*premise);
            }
        }
        let mut next_choice = choice.clone();
        next_choice.insert(derived, app);
        explore(graph, preds, next_pending, next_choice, out);
    }
}

fn finalize(
    graph: &DerivationGraph,
    preds: &BTreeMap<usize, Vec<usize>>,
    goal: usize,
    choice: BTreeMap<usize, usize>,
) -> AttackPath {
    // chain depth of each derived node under the chosen applications
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    fn depth_of(
        d: usize,
        graph: &DerivationGraph,
        preds: &BTreeMap<usize, Vec<usize>>,
        choice: &BTreeMap<usize, usize>,
        depth: &mut BTreeMap<usize, usize>,
    ) -> usize {
        if let Some(v) = depth.get(&d) {
            return *v;
        }
        let app = choice[&d];
        let mut best = 0usize;
        for premise in &preds[&app] {
            if graph.node(*premise).kind == NodeKind::Derived {
                best = best.max(depth_of(*premise, graph, preds, choice, depth));
            }
        }
        depth.insert(d, best + 1);
        best + 1
    }
    for d in choice.keys() {
        depth_of(*d, graph, preds, &choice, &mut depth);
    }

    let mut steps: Vec<usize> = choice.keys().copied().collect();
    steps.sort_by_key(|d| (depth[d], *d));

    let mut nodes: Vec<usize> = Vec::new();
    for (d, app) in &choice {
        nodes.push(*d);
        nodes.push(*app);
        for premise in &preds[app] {
            if graph.node(*premise).kind == NodeKind::Fact {
                nodes.push(*premise);
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();

    let hops = depth.values().copied().max().unwrap_or(1) - 1;
    AttackPath {
        goal,
        nodes,
        steps,
        choice,
        hops,
    }
}
