//! Interaction-rule text format.
//!
//! ```text
//! % RULE 5 (Net direct access.)
//! netAccess(P,H1,H2,Proto,Port) :- hasAccess(P,H1,H2,Proto,Port), hacl(H1,H2,Proto,Port).
//! attackGoal(localAccess(dvr, attacker)).
//! malicious(attacker).
//! ```
//!
//! A `% RULE <k> (<description>)` comment labels the next clause. Sentences
//! may span lines; `.` terminates. A sentence with an empty body is a fact.

use std::collections::BTreeSet;

use crate::fact_model::{parse_atom, Fact, FactError, LineCursor, Term};

use super::AgError;

/// Rule number and free-text description, unique per rule set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleLabel {
    pub number: u32,
    pub description: String,
}

impl std::fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RULE {} ({})", self.number, self.description)
    }
}

/// One atom pattern in a rule head or body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPattern {
    pub predicate: String,
    pub terms: Vec<Term>,
}

impl AtomPattern {
    pub fn variables(&self) -> BTreeSet<&str> {
        self.terms
            .iter()
            .filter(|t| t.is_variable())
            .map(|t| t.text())
            .collect()
    }

    /// Ground atoms convert to facts.
    pub fn to_fact(&self) -> Option<Fact> {
        let mut args = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match t {
                Term::Constant(c) => args.push(c.clone()),
                Term::Variable(_) => return None,
            }
        }
        Some(Fact {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

/// A Horn clause; empty body means a fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub head: AtomPattern,
    pub body: Vec<AtomPattern>,
    pub label: Option<RuleLabel>,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

/// Parsed interaction rules plus `attackGoal` directives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub clauses: Vec<Clause>,
    pub goals: Vec<Fact>,
}

impl RuleSet {
    /// Predicates that appear as the head of some clause (rules or in-file facts).
    pub fn head_predicates(&self) -> BTreeSet<&str> {
        self.clauses
            .iter()
            .map(|c| c.head.predicate.as_str())
            .collect()
    }

    /// Body predicates of all rules.
    pub fn body_predicates(&self) -> BTreeSet<&str> {
        self.clauses
            .iter()
            .flat_map(|c| c.body.iter())
            .map(|a| a.predicate.as_str())
            .collect()
    }

    /// Merge clauses and goals from another set (used when rules are split
    /// across one file per interaction rule).
    pub fn merge(&mut self, other: RuleSet) {
        self.clauses.extend(other.clauses);
        self.goals.extend(other.goals);
    }
}

fn rule_label_comment(line: &str) -> Option<RuleLabel> {
    let rest = line.trim().strip_prefix('%')?.trim();
    let rest = rest.strip_prefix("RULE ")?;
    let (num, desc) = rest.split_once('(')?;
    let number: u32 = num.trim().parse().ok()?;
    let description = desc.trim_end().strip_suffix(')')?.to_string();
    Some(RuleLabel {
        number,
        description,
    })
}

/// Parse interaction-rule text into a [`RuleSet`].
pub fn parse_rules(text: &str) -> Result<RuleSet, AgError> {
    let mut set = RuleSet::default();
    let mut pending_label: Option<RuleLabel> = None;
    let mut sentence = String::new();
    let mut sentence_start = 0usize;

    let syntax = |line: usize, e: FactError| AgError::Syntax {
        line,
        message: e.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') {
            if let Some(label) = rule_label_comment(line) {
                pending_label = Some(label);
            }
            continue;
        }
        if sentence.is_empty() {
            sentence_start = line_no;
        } else {
            sentence.push(' ');
        }
        sentence.push_str(line);
        if !sentence.trim_end().ends_with('.') {
            continue;
        }

        let full = std::mem::take(&mut sentence);
        let clause = parse_sentence(&full, sentence_start, pending_label.take())
            .map_err(|e| match e {
                ParseErr::Fact(f) => syntax(sentence_start, f),
                ParseErr::Ag(a) => a,
            })?;
        match clause {
            Parsed::Goal(goal) => set.goals.push(goal),
            Parsed::Clause(c) => set.clauses.push(c),
        }
    }
    if !sentence.trim().is_empty() {
        return Err(AgError::Syntax {
            line: sentence_start,
            message: "unterminated sentence (missing '.')".into(),
        });
    }

    // rule labels are unique within a set
    let mut seen = BTreeSet::new();
    for c in &set.clauses {
        if let Some(label) = &c.label {
            if !seen.insert(label.number) {
                return Err(AgError::DuplicateLabel(label.number));
            }
        }
    }
    Ok(set)
}

enum Parsed {
    Clause(Clause),
    Goal(Fact),
}

enum ParseErr {
    Fact(FactError),
    Ag(AgError),
}

impl From<FactError> for ParseErr {
    fn from(e: FactError) -> Self {
        ParseErr::Fact(e)
    }
}

fn parse_sentence(
    text: &str,
    line_no: usize,
    label: Option<RuleLabel>,
) -> Result<Parsed, ParseErr> {
    if text.trim_start().starts_with("attackGoal(") {
        return parse_goal_directive(text, line_no).map(Parsed::Goal);
    }

    let mut cur = LineCursor::new(text, line_no);
    let (pred, terms) = parse_atom(&mut cur)?;
    let head = AtomPattern {
        predicate: pred,
        terms,
    };

    let mut body = Vec::new();
    if cur.try_eat_str(":-") {
        loop {
            let (pred, terms) = parse_atom(&mut cur)?;
            body.push(AtomPattern {
                predicate: pred,
                terms,
            });
            if cur.try_eat(',') {
                continue;
            }
            break;
        }
    }
    cur.eat('.')?;

    // range restriction: every head variable appears in the body
    let body_vars: BTreeSet<&str> = body
        .iter()
        .flat_map(|a| a.variables().into_iter())
        .collect();
    for v in head.variables() {
        if !body_vars.contains(v) {
            return Err(ParseErr::Ag(AgError::UnboundHeadVariable {
                variable: v.to_string(),
                line: line_no,
            }));
        }
    }

    Ok(Parsed::Clause(Clause { head, body, label }))
}

/// `attackGoal(pred(a,b,...)).` - the inner atom must be ground.
fn parse_goal_directive(text: &str, line_no: usize) -> Result<Fact, ParseErr> {
    let inner = text
        .trim()
        .strip_prefix("attackGoal(")
        .and_then(|s| s.trim_end().strip_suffix(")."))
        .ok_or(ParseErr::Ag(AgError::Syntax {
            line: line_no,
            message: "malformed attackGoal directive".into(),
        }))?;
    let mut cur = LineCursor::new(inner, line_no);
    let (pred, terms) = parse_atom(&mut cur).map_err(ParseErr::Fact)?;
    let atom = AtomPattern {
        predicate: pred,
        terms,
    };
    atom.to_fact().ok_or_else(|| {
        let v = atom
            .variables()
            .into_iter()
            .next()
            .unwrap_or_default()
            .to_string();
        ParseErr::Ag(AgError::NonGroundGoal(v))
    })
}
