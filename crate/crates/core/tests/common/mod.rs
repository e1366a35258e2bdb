//! Shared generators and independent oracles for the integration and
//! property suites. Everything here is deliberately naive: the point is to
//! check the optimized implementations against straightforward re-derivations.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use scytag_core::ag_engine::{DerivationGraph, NodeKind, RuleSet};
use scytag_core::fact_model::{Fact, FactBase, Term, TopologySchema};

// ---------------------------------------------------------------------------
// Naive bottom-up fixpoint (the oracle for the semi-naive engine)
// ---------------------------------------------------------------------------

type Bindings = BTreeMap<String, String>;

fn match_terms(terms: &[Term], fact: &Fact, bindings: &Bindings) -> Option<Bindings> {
    if terms.len() != fact.args.len() {
        return None;
    }
    let mut out = bindings.clone();
    for (term, arg) in terms.iter().zip(&fact.args) {
        match term {
            Term::Constant(c) => {
                if c != arg {
                    return None;
                }
            }
            Term::Variable(v) => match out.get(v.as_str()) {
                Some(bound) if bound != arg => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), arg.clone());
                }
            },
        }
    }
    Some(out)
}

/// All ground atoms derivable from `facts` under `rules`, by repeated naive
/// application of every clause until nothing new appears.
pub fn naive_fixpoint(facts: &FactBase, rules: &RuleSet) -> BTreeSet<Fact> {
    let mut set: BTreeSet<Fact> = facts.iter().cloned().collect();
    for clause in &rules.clauses {
        if clause.is_fact() {
            if let Some(f) = clause.head.to_fact() {
                set.insert(f);
            }
        }
    }
    loop {
        let mut added = false;
        for clause in rules.clauses.iter().filter(|c| !c.is_fact()) {
            let mut frontier: Vec<Bindings> = vec![Bindings::new()];
            for pattern in &clause.body {
                let mut next = Vec::new();
                for bindings in &frontier {
                    for fact in set.iter().filter(|f| f.predicate == pattern.predicate) {
                        if let Some(extended) = match_terms(&pattern.terms, fact, bindings)
                        {
                            next.push(extended);
                        }
                    }
                }
                frontier = next;
            }
            for bindings in frontier {
                let args: Vec<String> = clause
                    .head
                    .terms
                    .iter()
                    .map(|t| match t {
                        Term::Constant(c) => c.clone(),
                        Term::Variable(v) => bindings[v.as_str()].clone(),
                    })
                    .collect();
                let fact = Fact {
                    predicate: clause.head.predicate.clone(),
                    args,
                };
                if set.insert(fact) {
                    added = true;
                }
            }
        }
        if !added {
            return set;
        }
    }
}

// ---------------------------------------------------------------------------
// Independent AND/OR reachability over a derivation graph
// ---------------------------------------------------------------------------

/// True when every goal of the graph is still derivable: a derived node needs
/// some application whose premises all hold, facts hold by themselves.
pub fn goals_hold(graph: &DerivationGraph) -> bool {
    if graph.goals.is_empty() {
        return false;
    }
    let preds = graph.predecessors();
    fn holds(
        id: usize,
        graph: &DerivationGraph,
        preds: &BTreeMap<usize, Vec<usize>>,
        memo: &mut BTreeMap<usize, bool>,
    ) -> bool {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        memo.insert(id, false);
        let v = match graph.node(id).kind {
            NodeKind::Fact => true,
            NodeKind::RuleApp => preds[&id].iter().all(|&p| holds(p, graph, preds, memo)),
            NodeKind::Derived => preds[&id].iter().any(|&p| holds(p, graph, preds, memo)),
        };
        memo.insert(id, v);
        v
    }
    let mut memo = BTreeMap::new();
    graph
        .goals
        .iter()
        .all(|&g| holds(g, graph, &preds, &mut memo))
}

// ---------------------------------------------------------------------------
// Random Datalog programs
// ---------------------------------------------------------------------------

const PREDS: [(&str, usize); 5] = [("p0", 1), ("p1", 2), ("p2", 2), ("p3", 1), ("p4", 2)];
const CONSTS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

/// A random program within the acceptance bounds: at most 30 facts and 8
/// range-restricted rules, as parseable source text.
pub fn random_program(seed: u64) -> (String, String) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut facts = String::new();
    for _ in 0..rng.gen_range(1..=30) {
        let (pred, arity) = PREDS[rng.gen_range(0..PREDS.len())];
        let args: Vec<&str> = (0..arity)
            .map(|_| CONSTS[rng.gen_range(0..CONSTS.len())])
            .collect();
        facts.push_str(&format!("{pred}({}).\n", args.join(",")));
    }

    let mut rules = String::new();
    for k in 0..rng.gen_range(1..=8) {
        let body_len = rng.gen_range(1..=3);
        let mut body = Vec::new();
        let mut vars_in_body: Vec<&str> = Vec::new();
        for _ in 0..body_len {
            let (pred, arity) = PREDS[rng.gen_range(0..PREDS.len())];
            let args: Vec<&str> = (0..arity)
                .map(|_| {
                    if rng.gen_bool(0.6) {
                        let v = VARS[rng.gen_range(0..VARS.len())];
                        vars_in_body.push(v);
                        v
                    } else {
                        CONSTS[rng.gen_range(0..CONSTS.len())]
                    }
                })
                .collect();
            body.push(format!("{pred}({})", args.join(",")));
        }
        let (pred, arity) = PREDS[rng.gen_range(0..PREDS.len())];
        let head_args: Vec<&str> = (0..arity)
            .map(|_| {
                if !vars_in_body.is_empty() && rng.gen_bool(0.7) {
                    vars_in_body[rng.gen_range(0..vars_in_body.len())]
                } else {
                    CONSTS[rng.gen_range(0..CONSTS.len())]
                }
            })
            .collect();
        rules.push_str(&format!("% RULE {} (Random rule {k}.)\n", k + 1));
        rules.push_str(&format!(
            "{pred}({}) :- {}.\n",
            head_args.join(","),
            body.join(", ")
        ));
    }
    (facts, rules)
}

// ---------------------------------------------------------------------------
// Random tree topologies with an embedded two-hop attack path
// ---------------------------------------------------------------------------

pub struct RandomScenario {
    pub topology: TopologySchema,
    pub rules_text: String,
    pub facts_text: String,
    /// The three hosts of the embedded hacl chain, in order.
    pub path_hosts: [String; 3],
}

/// A random connected tree with mixed device classes and a two-edge `hacl`
/// chain between three distinct leaf-ish hosts, plus the rules deriving
/// reachability across that chain.
pub fn random_scenario(seed: u64) -> RandomScenario {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(6..=14);
    let classes = ["router", "switch", "firewall", "workstation", "dns", "server"];
    let mut topology = TopologySchema::default();
    for i in 0..n {
        let class = if i == 0 {
            "cloud"
        } else {
            classes[rng.gen_range(0..classes.len())]
        };
        topology.nodes.push(scytag_core::fact_model::NodeRow {
            id: format!("n{i:02}"),
            class: class.to_string(),
            os: None,
        });
    }
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        topology.links.push(scytag_core::fact_model::LinkRow {
            a: format!("n{i:02}"),
            b: format!("n{parent:02}"),
            flow: None,
            direction: None,
        });
    }
    // one subnet over a random contiguous slice
    let lo = rng.gen_range(0..n - 1);
    let hi = rng.gen_range(lo + 1..n);
    topology.subnets.push(scytag_core::fact_model::SubnetRow {
        name: "zone".into(),
        vlan: Some(7),
        members: (lo..=hi).map(|i| format!("n{i:02}")).collect(),
        virtual_ports: Vec::new(),
    });

    let mut picks: Vec<usize> = (0..n).collect();
    for i in (1..picks.len()).rev() {
        picks.swap(i, rng.gen_range(0..=i));
    }
    let [a, b, c] = [picks[0], picks[1], picks[2]].map(|i| format!("n{i:02}"));
    topology.acls.push(scytag_core::fact_model::AclRow {
        src: a.clone(),
        dst: b.clone(),
        protocol: "tcp".into(),
        port: "22".into(),
    });
    topology.acls.push(scytag_core::fact_model::AclRow {
        src: b.clone(),
        dst: c.clone(),
        protocol: "tcp".into(),
        port: "22".into(),
    });

    let rules_text = format!(
        "% RULE 1 (Initial access.)\n\
         controlled(A) :- attackerAt(A).\n\
         % RULE 2 (Lateral movement.)\n\
         controlled(B) :- controlled(A), hacl(A,B,tcp,'22').\n\
         attackGoal(controlled({c})).\n"
    );
    RandomScenario {
        topology,
        rules_text,
        facts_text: format!("attackerAt({a}).\n"),
        path_hosts: [a, b, c],
    }
}

// ---------------------------------------------------------------------------
// Brute-force Kendall tau-a over the deduplicated common elements
// ---------------------------------------------------------------------------

pub fn tau_bruteforce(full: &[String], twin: &[String]) -> Option<f64> {
    fn dedup(seq: &[String]) -> Vec<&String> {
        let mut seen = BTreeSet::new();
        seq.iter().filter(|s| seen.insert(s.as_str())).collect()
    }
    let f = dedup(full);
    let t = dedup(twin);
    let common: Vec<&&String> = f
        .iter()
        .filter(|x| t.iter().any(|y| y == *x))
        .collect();
    if common.len() < 2 {
        return None;
    }
    let pos_f: BTreeMap<&str, usize> = common
        .iter()
        .enumerate()
        .map(|(i, x)| (x.as_str(), i))
        .collect();
    let pos_t: BTreeMap<&str, usize> = t
        .iter()
        .filter(|x| pos_f.contains_key(x.as_str()))
        .enumerate()
        .map(|(i, x)| (x.as_str(), i))
        .collect();
    let names: Vec<&str> = pos_f.keys().copied().collect();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let df = pos_f[names[i]] as i64 - pos_f[names[j]] as i64;
            let dt = pos_t[names[i]] as i64 - pos_t[names[j]] as i64;
            if df * dt > 0 {
                concordant += 1;
            } else if df * dt < 0 {
                discordant += 1;
            }
        }
    }
    let pairs = (names.len() * (names.len() - 1) / 2) as f64;
    Some((concordant - discordant) as f64 / pairs)
}
