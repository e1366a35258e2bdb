//! The AND/OR derivation graph and its text/JSON exports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fact_model::Fact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Primitive fact leaf, printed `[n]`.
    Fact,
    /// Rule application (AND node), printed `(n)`.
    RuleApp,
    /// Derived predicate (OR node), printed `<n>`.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub kind: NodeKind,
    /// Atom text for fact/derived nodes, `RULE k (desc)` for applications.
    pub label: String,
    /// Structured atom for fact and derived nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom: Option<Fact>,
}

/// MulVAL-style attack graph. Edges run premise -> rule application and
/// rule application -> conclusion; the graph is pruned to goal support.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<(usize, usize)>,
    /// Node ids of the goal atoms.
    pub goals: Vec<usize>,
}

impl DerivationGraph {
    /// An empty attack graph is a value, not an error: no goal was derivable.
    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn node(&self, id: usize) -> &GraphNode {
        &self.nodes[id - 1]
    }

    pub fn derived_atoms(&self) -> impl Iterator<Item = &Fact> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Derived)
            .filter_map(|n| n.atom.as_ref())
    }

    pub fn fact_atoms(&self) -> impl Iterator<Item = &Fact> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Fact)
            .filter_map(|n| n.atom.as_ref())
    }

    pub fn find_derived(&self, atom: &Fact) -> Option<&GraphNode> {
        self.nodes
            .iter()
            .find(|n| n.kind == NodeKind::Derived && n.atom.as_ref() == Some(atom))
    }

    /// Incoming edges per node (premises of an application, applications of a
    /// derived atom).
    pub fn predecessors(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for n in &self.nodes {
            map.entry(n.id).or_default();
        }
        for (from, to) in &self.edges {
            map.entry(*to).or_default().push(*from);
        }
        map
    }

    pub fn successors(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for n in &self.nodes {
            map.entry(n.id).or_default();
        }
        for (from, to) in &self.edges {
            map.entry(*from).or_default().push(*to);
        }
        map
    }

    /// One node per line, in the interleaved `<n>:`/`(n):`/`[n]:` shape.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let line = match n.kind {
                NodeKind::Derived => format!("<{}>:{}", n.id, n.label),
                NodeKind::RuleApp => format!("({}):{}", n.id, n.label),
                NodeKind::Fact => format!("[{}]:{}", n.id, n.label),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Edges as (label, label) pairs; the canonical form used by the path
    /// equivalence metric.
    pub fn labeled_edges(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|(a, b)| (self.node(*a).label.clone(), self.node(*b).label.clone()))
            .collect()
    }
}
