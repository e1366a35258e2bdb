//! Missing-fact completion and semi-naive bottom-up evaluation with full
//! derivation recording.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::fact_model::{Fact, FactBase, Term, TOPOLOGY_PREDICATES, VUL_EXISTS};

use super::graph::{DerivationGraph, GraphNode, NodeKind};
use super::rules::{AtomPattern, Clause, RuleSet};
use super::AgError;

/// What the completer injected and why.
#[derive(Debug, Clone, Default)]
pub struct CompletionReport {
    pub injected: FactBase,
    /// Environmental predicates that required injection.
    pub environmental: Vec<String>,
}

/// Inject environmental facts: body predicates that are neither topology
/// predicates (nor `vulExists`) nor the head of any rule cannot come from the
/// network model and would make every dependent rule unsatisfiable. Their
/// ground atoms are pulled from `assumptions`.
pub fn complete_missing_facts(
    rules: &RuleSet,
    facts: &FactBase,
    assumptions: &FactBase,
) -> Result<(FactBase, CompletionReport), AgError> {
    let heads = rules.head_predicates();
    let mut environmental: Vec<String> = Vec::new();
    for pred in rules.body_predicates() {
        if TOPOLOGY_PREDICATES.contains(&pred) || pred == VUL_EXISTS || heads.contains(pred) {
            continue;
        }
        environmental.push(pred.to_string());
    }

    let mut unresolved = Vec::new();
    let mut report = CompletionReport {
        environmental: environmental.clone(),
        ..Default::default()
    };
    let mut out = facts.clone();
    for pred in &environmental {
        let mut found = false;
        for atom in assumptions.with_predicate(pred) {
            found = true;
            if !facts.contains(atom) {
                report.injected.insert(atom.clone());
                out.insert(atom.clone());
            }
        }
        if !found {
            unresolved.push(pred.clone());
        }
    }
    if !unresolved.is_empty() {
        return Err(AgError::UnresolvedEnvironmental(unresolved));
    }
    Ok((out, report))
}

/// One ground rule application: the AND node of the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Application {
    rule_no: u32,
    clause_idx: usize,
    premises: Vec<Fact>,
}

type Bindings = BTreeMap<String, String>;

fn match_atom(pattern: &AtomPattern, fact: &Fact, bindings: &mut Bindings) -> bool {
    if pattern.predicate != fact.predicate || pattern.terms.len() != fact.args.len() {
        return false;
    }
    let mut added = Vec::new();
    for (term, arg) in pattern.terms.iter().zip(fact.args.iter()) {
        match term {
            Term::Constant(c) => {
                if c != arg {
                    for k in added {
                        bindings.remove(&k);
                    }
                    return false;
                }
            }
            Term::Variable(v) if v == "_" => {}
            Term::Variable(v) => match bindings.get(v) {
                Some(bound) if bound != arg => {
                    for k in added {
                        bindings.remove(&k);
                    }
                    return false;
                }
                Some(_) => {}
                None => {
                    bindings.insert(v.clone(), arg.clone());
                    added.push(v.clone());
                }
            },
        }
    }
    true
}

fn instantiate(pattern: &AtomPattern, bindings: &Bindings) -> Fact {
    let args = pattern
        .terms
        .iter()
        .map(|t| match t {
            Term::Constant(c) => c.clone(),
            Term::Variable(v) => bindings
                .get(v)
                .cloned()
                .unwrap_or_else(|| format!("_{v}")),
        })
        .collect();
    Fact {
        predicate: pattern.predicate.clone(),
        args,
    }
}

struct Index<'a> {
    by_pred: HashMap<&'a str, Vec<&'a Fact>>,
}

impl<'a> Index<'a> {
    fn new(facts: impl Iterator<Item = &'a Fact>) -> Self {
        let mut by_pred: HashMap<&'a str, Vec<&'a Fact>> = HashMap::new();
        for f in facts {
            by_pred.entry(f.predicate.as_str()).or_default().push(f);
        }
        Index { by_pred }
    }

    fn candidates(&self, pred: &str) -> &[&'a Fact] {
        self.by_pred.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Enumerate all ground instantiations of `clause` where body position
/// `delta_pos` matches within `delta` and the rest within `full`.
fn fire_clause(
    clause: &Clause,
    clause_idx: usize,
    full: &Index,
    delta: Option<(usize, &Index)>,
    out: &mut Vec<(Fact, Application)>,
) {
    fn recur(
        clause: &Clause,
        clause_idx: usize,
        full: &Index,
        delta: Option<(usize, &Index)>,
        pos: usize,
        bindings: &mut Bindings,
        premises: &mut Vec<Fact>,
        out: &mut Vec<(Fact, Application)>,
    ) {
        if pos == clause.body.len() {
            let head = instantiate(&clause.head, bindings);
            let rule_no = clause.label.as_ref().map(|l| l.number).unwrap_or(u32::MAX);
            out.push((
                head,
                Application {
                    rule_no,
                    clause_idx,
                    premises: premises.clone(),
                },
            ));
            return;
        }
        let source = match delta {
            Some((d, idx)) if d == pos => idx,
            _ => full,
        };
        let pattern = &clause.body[pos];
        for fact in source.candidates(&pattern.predicate) {
            let before: Bindings = bindings.clone();
            if match_atom(pattern, fact, bindings) {
                premises.push((*fact).clone());
                recur(clause, clause_idx, full, delta, pos + 1, bindings, premises, out);
                premises.pop();
            }
            *bindings = before;
        }
    }
    let mut bindings = Bindings::new();
    let mut premises = Vec::new();
    recur(
        clause,
        clause_idx,
        full,
        delta,
        0,
        &mut bindings,
        &mut premises,
        out,
    );
}

/// Evaluate the rules over the fact base to the least fixpoint and build the
/// derivation graph pruned to goal support. Completion must already have been
/// applied; an underivable goal yields an empty graph, not an error.
pub fn evaluate(facts: &FactBase, rules: &RuleSet) -> DerivationGraph {
    // in-file zero-body clauses act as additional primitive facts
    let mut primitive: BTreeSet<Fact> = facts.iter().cloned().collect();
    for c in &rules.clauses {
        if c.is_fact() {
            if let Some(f) = c.head.to_fact() {
                primitive.insert(f);
            }
        }
    }

    let rule_clauses: Vec<(usize, &Clause)> = rules
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_fact())
        .collect();

    let mut all: BTreeSet<Fact> = primitive.clone();
    // first round in which each derived atom appeared (for cycle-free AND/OR
    // structure under recursion)
    let mut round_of: BTreeMap<Fact, usize> = BTreeMap::new();
    let mut applications: BTreeMap<Fact, BTreeSet<Application>> = BTreeMap::new();

    let mut fired = Vec::new();
    {
        let full = Index::new(all.iter());
        for (idx, clause) in &rule_clauses {
            fire_clause(clause, *idx, &full, None, &mut fired);
        }
    }

    let mut round = 1usize;
    let mut delta: BTreeSet<Fact> = BTreeSet::new();
    loop {
        for (head, app) in fired.drain(..) {
            if !primitive.contains(&head) {
                round_of.entry(head.clone()).or_insert(round);
                applications.entry(head.clone()).or_default().insert(app);
                if !all.contains(&head) {
                    delta.insert(head.clone());
                }
            }
            all.insert(head);
        }
        if delta.is_empty() {
            break;
        }
        let new_delta = std::mem::take(&mut delta);
        round += 1;
        let full = Index::new(all.iter());
        let delta_idx = Index::new(new_delta.iter());
        for (idx, clause) in &rule_clauses {
            for pos in 0..clause.body.len() {
                fire_clause(clause, *idx, &full, Some((pos, &delta_idx)), &mut fired);
            }
        }
    }

    // Drop applications that would close a derivation cycle. A premise is
    // safe if the conclusion cannot contribute to it at all, or (inside a
    // recursive clique) if it was established in a strictly earlier round,
    // which preserves the first derivation of every atom.
    let contributes_to = contribution_closure(&applications, &primitive);
    let acyclic_apps: BTreeMap<&Fact, Vec<&Application>> = applications
        .iter()
        .map(|(head, apps)| {
            let head_round = round_of[head];
            let reachable = contributes_to.get(head);
            let kept: Vec<&Application> = apps
                .iter()
                .filter(|app| {
                    app.premises.iter().all(|p| {
                        primitive.contains(p)
                            || !reachable.is_some_and(|r| r.contains(p))
                            || round_of.get(p).is_some_and(|r| *r < head_round)
                    })
                })
                .collect();
            (head, kept)
        })
        .collect();

    let goals: Vec<&Fact> = rules.goals.iter().filter(|g| all.contains(*g)).collect();
    if goals.is_empty() {
        return DerivationGraph::default();
    }

    build_graph(rules, &primitive, &acyclic_apps, &goals)
}

/// For every derived atom, the set of derived atoms it (transitively) helps
/// derive, following premise -> conclusion over all recorded applications.
fn contribution_closure(
    applications: &BTreeMap<Fact, BTreeSet<Application>>,
    primitive: &BTreeSet<Fact>,
) -> BTreeMap<Fact, BTreeSet<Fact>> {
    let mut succ: BTreeMap<&Fact, BTreeSet<&Fact>> = BTreeMap::new();
    for (head, apps) in applications {
        for app in apps {
            for premise in &app.premises {
                if !primitive.contains(premise) {
                    succ.entry(premise).or_default().insert(head);
                }
            }
        }
    }
    let mut closure = BTreeMap::new();
    for atom in applications.keys() {
        let mut reached: BTreeSet<Fact> = BTreeSet::new();
        let mut stack: Vec<&Fact> = succ.get(atom).into_iter().flatten().copied().collect();
        while let Some(next) = stack.pop() {
            if reached.insert(next.clone()) {
                stack.extend(succ.get(next).into_iter().flatten().copied());
            }
        }
        closure.insert(atom.clone(), reached);
    }
    closure
}

fn rule_label_text(rules: &RuleSet, clause_idx: usize) -> String {
    let clause = &rules.clauses[clause_idx];
    match &clause.label {
        Some(label) => label.to_string(),
        None => format!("RULE - ({})", clause.head.predicate),
    }
}

fn build_graph(
    rules: &RuleSet,
    primitive: &BTreeSet<Fact>,
    apps: &BTreeMap<&Fact, Vec<&Application>>,
    goals: &[&Fact],
) -> DerivationGraph {
    struct Builder<'a> {
        rules: &'a RuleSet,
        primitive: &'a BTreeSet<Fact>,
        apps: &'a BTreeMap<&'a Fact, Vec<&'a Application>>,
        nodes: Vec<GraphNode>,
        edges: Vec<(usize, usize)>,
        derived_ids: BTreeMap<Fact, usize>,
        fact_ids: BTreeMap<Fact, usize>,
    }

    impl<'a> Builder<'a> {
        fn push(&mut self, kind: NodeKind, label: String, atom: Option<Fact>) -> usize {
            let id = self.nodes.len() + 1;
            self.nodes.push(GraphNode {
                id,
                kind,
                label,
                atom,
            });
            id
        }

        fn visit_fact(&mut self, atom: &Fact) -> usize {
            if let Some(id) = self.fact_ids.get(atom) {
                return *id;
            }
            let id = self.push(NodeKind::Fact, atom.to_string(), Some(atom.clone()));
            self.fact_ids.insert(atom.clone(), id);
            id
        }

        fn visit_derived(&mut self, atom: &Fact) -> usize {
            if let Some(id) = self.derived_ids.get(atom) {
                return *id;
            }
            let id = self.push(NodeKind::Derived, atom.to_string(), Some(atom.clone()));
            self.derived_ids.insert(atom.clone(), id);
            let applications = self.apps.get(atom).cloned().unwrap_or_default();
            for app in applications {
                let label = rule_label_text(self.rules, app.clause_idx);
                let app_id = self.push(NodeKind::RuleApp, label, None);
                self.edges.push((app_id, id));
                for premise in &app.premises {
                    let pid = if self.primitive.contains(premise) {
                        self.visit_fact(premise)
                    } else {
                        self.visit_derived(premise)
                    };
                    self.edges.push((pid, app_id));
                }
            }
            id
        }
    }

    let mut builder = Builder {
        rules,
        primitive,
        apps,
        nodes: Vec::new(),
        edges: Vec::new(),
        derived_ids: BTreeMap::new(),
        fact_ids: BTreeMap::new(),
    };

    let mut goal_ids = Vec::new();
    for goal in goals {
        let id = if primitive.contains(*goal) {
            builder.visit_fact(goal)
        } else {
            builder.visit_derived(goal)
        };
        goal_ids.push(id);
    }

    DerivationGraph {
        nodes: builder.nodes,
        edges: builder.edges,
        goals: goal_ids,
    }
}
