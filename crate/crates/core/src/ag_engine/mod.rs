//! Logical attack graph engine: Horn-clause interaction rules evaluated to a
//! least fixpoint over a fact base, with every derivation recorded as an
//! AND/OR graph in the MulVAL style (`[n]` primitive fact, `(n)` rule
//! application, `<n>` derived predicate).

mod eval;
mod graph;
mod paths;
mod rules;

pub use eval::{complete_missing_facts, evaluate, CompletionReport};
pub use graph::{DerivationGraph, GraphNode, NodeKind};
pub use paths::{enumerate_attack_paths, AttackPath};
pub use rules::{parse_rules, Clause, RuleLabel, RuleSet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgError {
    #[error("rule syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("head variable {variable:?} of rule at line {line} does not appear in the body")]
    UnboundHeadVariable { variable: String, line: usize },
    #[error("duplicate rule label {0}")]
    DuplicateLabel(u32),
    #[error("unresolved environmental predicates: {}", .0.join(", "))]
    UnresolvedEnvironmental(Vec<String>),
    #[error("goal directive must be ground, found variable {0:?}")]
    NonGroundGoal(String),
}
