//! The evaluation engine against a naive bottom-up oracle: on random
//! programs, a goal yields a non-empty graph exactly when the goal is in the
//! naive fixpoint, and every atom in the graph is sound.

#[path = "common/mod.rs"]
mod common;

use proptest::prelude::*;
use scytag_core::ag_engine::{evaluate, parse_rules, NodeKind};
use scytag_core::fact_model::{parse_fact_text, Fact};

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn agrees_with_naive_fixpoint(seed in any::<u64>()) {
        let (facts_text, rules_text) = common::random_program(seed);
        let facts = parse_fact_text(&facts_text).unwrap();
        let rules = parse_rules(&rules_text).unwrap();
        let oracle = common::naive_fixpoint(&facts, &rules);

        // candidate goals: derived atoms, plus atoms over constants the
        // program never mentions, which must stay underivable
        let mut candidates: Vec<Fact> = oracle
            .iter()
            .filter(|f| !facts.contains(f))
            .take(5)
            .cloned()
            .collect();
        candidates.push(Fact::new("p1", &["zz", "zz"]));
        candidates.push(Fact::new("p0", &["qq"]));

        for goal in candidates {
            let mut with_goal = rules.clone();
            with_goal.goals = vec![goal.clone()];
            let graph = evaluate(&facts, &with_goal);
            prop_assert_eq!(
                !graph.is_empty(),
                oracle.contains(&goal),
                "goal {} (seed {})", goal, seed
            );
            for node in &graph.nodes {
                match node.kind {
                    NodeKind::Derived => {
                        let atom = node.atom.as_ref().expect("derived node has atom");
                        prop_assert!(
                            oracle.contains(atom),
                            "unsound derived atom {} (seed {})", atom, seed
                        );
                    }
                    NodeKind::Fact => {
                        let atom = node.atom.as_ref().expect("fact node has atom");
                        prop_assert!(
                            facts.contains(atom),
                            "fact node {} not in the base (seed {})", atom, seed
                        );
                    }
                    NodeKind::RuleApp => {}
                }
            }
        }
    }

    #[test]
    fn graph_edges_are_well_formed(seed in any::<u64>()) {
        let (facts_text, rules_text) = common::random_program(seed);
        let facts = parse_fact_text(&facts_text).unwrap();
        let mut rules = parse_rules(&rules_text).unwrap();
        let oracle = common::naive_fixpoint(&facts, &rules);
        let Some(goal) = oracle.iter().find(|f| !facts.contains(f)).cloned() else {
            return Ok(());
        };
        rules.goals = vec![goal];
        let graph = evaluate(&facts, &rules);

        // ids are dense 1..=n and every edge joins an atom node to a rule
        // application, in either role
        for (i, node) in graph.nodes.iter().enumerate() {
            prop_assert_eq!(node.id, i + 1);
        }
        for &(a, b) in &graph.edges {
            let (ka, kb) = (graph.node(a).kind, graph.node(b).kind);
            let app_to_atom = ka == NodeKind::RuleApp && kb == NodeKind::Derived;
            let atom_to_app = ka != NodeKind::RuleApp && kb == NodeKind::RuleApp;
            prop_assert!(app_to_atom || atom_to_app, "edge {a}->{b} (seed {seed})");
        }
        // the graph is goal-pruned, so the goal must still be derivable from
        // its own leaves
        prop_assert!(common::goals_hold(&graph), "seed {}", seed);
    }
}
