//! Topology ingestion and the Datalog fact substrate.
//!
//! Parses topology documents and vulnerability catalogs, emits the eight
//! topology fact predicates plus `vulExists`, and reads/writes the plain
//! Datalog text format (`pred(a,b,c).`, `%` comments).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The eight predicates a topology document may emit.
pub const TOPOLOGY_PREDICATES: [&str; 8] = [
    "dataBind",
    "dataFlow",
    "isInSubnet",
    "belongsTo",
    "hasIP",
    "networkService",
    "hacl",
    "residesOn",
];

/// Predicate carrying vulnerability records.
pub const VUL_EXISTS: &str = "vulExists";

#[derive(Debug, Error)]
pub enum FactError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed topology document: {0}")]
    Malformed(String),
    #[error("dangling reference: {kind} row references unknown node {node:?}")]
    DanglingReference { kind: String, node: String },
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("vulnerability catalog error: {0}")]
    Catalog(String),
}

/// A Datalog term: constant or variable.
///
/// Constants are lowercase-initial identifiers, quoted strings, or bare
/// numbers; variables start with an uppercase letter or underscore.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn constant(s: impl Into<String>) -> Self {
        Term::Constant(s.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn text(&self) -> &str {
        match self {
            Term::Constant(s) | Term::Variable(s) => s,
        }
    }
}

fn is_plain_constant(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "{v}"),
            // Constants with non-identifier characters (dots, dashes,
            // digit-first) are single-quoted, matching MulVAL fact text.
            Term::Constant(c) => {
                if is_plain_constant(c) {
                    write!(f, "{c}")
                } else {
                    write!(f, "'{c}'")
                }
            }
        }
    }
}

/// A ground atom: predicate plus constant arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Fact {
            predicate: predicate.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", Term::Constant(a.clone()))?;
        }
        write!(f, ")")
    }
}

/// An ordered, deduplicated set of ground facts.
///
/// Iteration order is (predicate, args) lexicographic, so serialization is
/// deterministic: the same fact set always yields byte-identical text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactBase {
    facts: BTreeSet<Fact>,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fact: Fact) -> bool {
        self.facts.insert(fact)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Fact> {
        self.facts.iter().filter(move |f| f.predicate == predicate)
    }

    pub fn extend(&mut self, other: &FactBase) {
        for f in other.iter() {
            self.facts.insert(f.clone());
        }
    }

    pub fn predicates(&self) -> BTreeSet<&str> {
        self.facts.iter().map(|f| f.predicate.as_str()).collect()
    }
}

impl FromIterator<Fact> for FactBase {
    fn from_iter<T: IntoIterator<Item = Fact>>(iter: T) -> Self {
        FactBase {
            facts: iter.into_iter().collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Datalog text format
// ---------------------------------------------------------------------------

/// Cursor over one line of Datalog text. Shared with the rule parser.
pub(crate) struct LineCursor<'a> {
    line: &'a str,
    pub line_no: usize,
    pos: usize,
}

impl<'a> LineCursor<'a> {
    pub fn new(line: &'a str, line_no: usize) -> Self {
        LineCursor { line, line_no, pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> FactError {
        FactError::Syntax {
            line: self.line_no,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    pub fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.line[self.pos..].chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: char) -> Result<(), FactError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected {c:?}")))
        }
    }

    pub fn try_eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn try_eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.line[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.line[start..self.pos]
    }

    /// predicate name or bare constant word
    pub fn parse_word(&mut self) -> Result<&'a str, FactError> {
        self.skip_ws();
        let w = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if w.is_empty() {
            Err(self.err("expected identifier"))
        } else {
            Ok(w)
        }
    }
}

/// Parse Datalog fact text: one fact per line, `pred(a,b).`, `%` comments.
pub fn parse_fact_text(text: &str) -> Result<FactBase, FactError> {
    let mut base = FactBase::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let atom = parse_ground_atom_line(line, idx + 1)?;
        base.insert(atom);
    }
    Ok(base)
}

fn parse_ground_atom_line(line: &str, line_no: usize) -> Result<Fact, FactError> {
    let mut cur = LineCursor::new(line, line_no);
    let atom = parse_atom(&mut cur)?;
    cur.eat('.')?;
    if !cur.at_end() {
        return Err(FactError::Syntax {
            line: line_no,
            column: 0,
            message: "trailing input after '.'".into(),
        });
    }
    let mut args = Vec::with_capacity(atom.1.len());
    for t in atom.1 {
        match t {
            Term::Constant(c) => args.push(c),
            Term::Variable(v) => {
                return Err(FactError::Syntax {
                    line: line_no,
                    column: 0,
                    message: format!("variable {v:?} not allowed in a ground fact"),
                })
            }
        }
    }
    Ok(Fact {
        predicate: atom.0,
        args,
    })
}

/// Parse `pred(t1,...,tn)` (or a bare `pred`) and classify terms.
pub(crate) fn parse_atom(cur: &mut LineCursor) -> Result<(String, Vec<Term>), FactError> {
    cur.skip_ws();
    let pred = cur.parse_word()?.to_string();
    let mut terms = Vec::new();
    if cur.try_eat('(') {
        loop {
            let term = parse_one_term(cur)?;
            terms.push(term);
            if cur.try_eat(',') {
                continue;
            }
            cur.eat(')')?;
            break;
        }
    }
    Ok((pred, terms))
}

fn parse_one_term(cur: &mut LineCursor) -> Result<Term, FactError> {
    cur.skip_ws();
    match cur.peek() {
        Some('\'') => {
            cur.pos += 1;
            let start = cur.pos;
            while cur.peek().is_some_and(|c| c != '\'') {
                cur.pos += 1;
            }
            if cur.peek() != Some('\'') {
                return Err(cur.err("unterminated quoted constant"));
            }
            let text = cur.line[start..cur.pos].to_string();
            cur.pos += 1;
            if text.is_empty() {
                return Err(cur.err("empty constant"));
            }
            Ok(Term::Constant(text))
        }
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            let word = cur
                .take_while(|c| c.is_ascii_alphanumeric() || c == '_')
                .to_string();
            if c.is_ascii_uppercase() || c == '_' {
                Ok(Term::Variable(word))
            } else {
                Ok(Term::Constant(word))
            }
        }
        Some(c) => Err(cur.err(format!("unexpected character {c:?} in term"))),
        None => Err(cur.err("unexpected end of line in term")),
    }
}

/// Serialize a fact base to canonical Datalog text, one fact per line.
pub fn serialize_facts(base: &FactBase) -> String {
    let mut out = String::new();
    for fact in base.iter() {
        out.push_str(&fact.to_string());
        out.push_str(".\n");
    }
    out
}

// ---------------------------------------------------------------------------
// Topology schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct NodeRow {
    pub id: String,
    pub class: String,
    #[serde(default)]
    pub os: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InterfaceRow {
    pub node: String,
    pub name: String,
    pub address: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinkRow {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub flow: Option<String>,
    #[serde(default)]
    pub direction: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SoftwareRow {
    pub node: String,
    pub software: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ServiceRow {
    pub node: String,
    pub software: String,
    pub protocol: String,
    pub port: String,
    pub account: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AclRow {
    pub src: String,
    pub dst: String,
    pub protocol: String,
    pub port: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SubnetRow {
    pub name: String,
    #[serde(default)]
    pub vlan: Option<u32>,
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default)]
    pub virtual_ports: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BindingRow {
    pub flow: String,
    pub src_host: String,
    pub path: String,
}

/// Unified topology document: nodes, interfaces, links, software, services,
/// ACLs, subnets, and optional data bindings.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct TopologySchema {
    #[serde(default)]
    pub nodes: Vec<NodeRow>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceRow>,
    #[serde(default)]
    pub links: Vec<LinkRow>,
    #[serde(default)]
    pub software: Vec<SoftwareRow>,
    #[serde(default)]
    pub services: Vec<ServiceRow>,
    #[serde(default)]
    pub acls: Vec<AclRow>,
    #[serde(default)]
    pub subnets: Vec<SubnetRow>,
    #[serde(default)]
    pub bindings: Vec<BindingRow>,
}

impl TopologySchema {
    pub fn node_ids(&self) -> BTreeSet<&str> {
        self.nodes.iter().map(|n| n.id.as_str()).collect()
    }

    pub fn node(&self, id: &str) -> Option<&NodeRow> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Validate referential invariants: unique node ids, and links, services,
    /// software, interfaces, subnet members referencing existing nodes.
    pub fn validate(&self) -> Result<(), FactError> {
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id.as_str()) {
                return Err(FactError::DuplicateNode(n.id.clone()));
            }
        }
        let dangling = |kind: &str, node: &str| FactError::DanglingReference {
            kind: kind.to_string(),
            node: node.to_string(),
        };
        for l in &self.links {
            for end in [&l.a, &l.b] {
                if !seen.contains(end.as_str()) {
                    return Err(dangling("link", end));
                }
            }
        }
        for i in &self.interfaces {
            if !seen.contains(i.node.as_str()) {
                return Err(dangling("interface", &i.node));
            }
        }
        for s in &self.software {
            if !seen.contains(s.node.as_str()) {
                return Err(dangling("software", &s.node));
            }
        }
        for s in &self.services {
            if !seen.contains(s.node.as_str()) {
                return Err(dangling("service", &s.node));
            }
        }
        for sub in &self.subnets {
            for m in &sub.members {
                if !seen.contains(m.as_str()) {
                    return Err(dangling("subnet member", m));
                }
            }
        }
        Ok(())
    }
}

/// Parse a topology JSON document and check its referential invariants.
pub fn parse_topology(document: &str) -> Result<TopologySchema, FactError> {
    let schema: TopologySchema =
        serde_json::from_str(document).map_err(|e| FactError::Malformed(e.to_string()))?;
    schema.validate()?;
    Ok(schema)
}

/// Emit exactly one fact per schema row, using only the eight topology
/// predicates. Deterministic: same schema -> byte-identical fact text.
pub fn emit_topology_facts(schema: &TopologySchema) -> FactBase {
    let mut base = FactBase::new();
    for i in &schema.interfaces {
        base.insert(Fact::new("hasIP", &[&i.address, &i.node]));
    }
    for l in &schema.links {
        let flow = l.flow.as_deref().unwrap_or("link");
        let direction = l.direction.as_deref().unwrap_or("bidirectional");
        base.insert(Fact::new("dataFlow", &[&l.a, &l.b, flow, direction]));
    }
    for s in &schema.software {
        base.insert(Fact::new("residesOn", &[&s.node, &s.software, &s.version]));
    }
    for s in &schema.services {
        base.insert(Fact::new(
            "networkService",
            &[&s.node, &s.software, &s.protocol, &s.port, &s.account],
        ));
    }
    for a in &schema.acls {
        base.insert(Fact::new("hacl", &[&a.src, &a.dst, &a.protocol, &a.port]));
    }
    for sub in &schema.subnets {
        for m in &sub.members {
            base.insert(Fact::new("isInSubnet", &[&sub.name, m]));
        }
        for vp in &sub.virtual_ports {
            base.insert(Fact::new("belongsTo", &[&sub.name, vp]));
        }
    }
    for b in &schema.bindings {
        base.insert(Fact::new("dataBind", &[&b.flow, &b.src_host, &b.path]));
    }
    base
}

// ---------------------------------------------------------------------------
// Vulnerability mapping
// ---------------------------------------------------------------------------

/// One row of the vulnerability catalog; maps one-to-one to a `vulExists/6`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VulnRecord {
    pub cve_id: String,
    pub software: String,
    pub version: String,
    pub access_vector: String,
    pub lose_types: String,
    pub severity: String,
}

/// Parse a vulnerability catalog from CSV
/// (`cve_id,software,version,access_vector,lose_types,severity`).
pub fn parse_vuln_catalog(csv_text: &str) -> Result<Vec<VulnRecord>, FactError> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut records = Vec::new();
    for row in reader.deserialize() {
        let rec: VulnRecord = row.map_err(|e| FactError::Catalog(e.to_string()))?;
        records.push(rec);
    }
    Ok(records)
}

/// Outcome of vulnerability mapping: the `vulExists` facts plus the inventory
/// rows that matched nothing (left for analyst review).
#[derive(Debug, Clone, Default)]
pub struct VulnMapping {
    pub facts: FactBase,
    pub unmatched: Vec<SoftwareRow>,
}

/// Emit one `vulExists` fact per catalog entry whose (software, version) pair
/// is installed on some host. Unmatched software is reported, not an error.
pub fn map_vulnerabilities(inventory: &[SoftwareRow], vuln_db: &[VulnRecord]) -> VulnMapping {
    let mut by_pair: BTreeMap<(&str, &str), Vec<&VulnRecord>> = BTreeMap::new();
    for rec in vuln_db {
        by_pair
            .entry((rec.software.as_str(), rec.version.as_str()))
            .or_default()
            .push(rec);
    }
    let mut mapping = VulnMapping::default();
    let mut seen_pairs = BTreeSet::new();
    for row in inventory {
        let pair = (row.software.as_str(), row.version.as_str());
        match by_pair.get(&pair) {
            Some(records) => {
                if seen_pairs.insert(pair) {
                    for rec in records {
                        mapping.facts.insert(Fact::new(
                            VUL_EXISTS,
                            &[
                                &rec.cve_id,
                                &rec.software,
                                &rec.version,
                                &rec.access_vector,
                                &rec.lose_types,
                                &rec.severity,
                            ],
                        ));
                    }
                }
            }
            None => mapping.unmatched.push(row.clone()),
        }
    }
    mapping
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_fact() {
        let base = parse_fact_text("hacl(adminPC1,cameraA,tcp,'22').").unwrap();
        assert_eq!(base.len(), 1);
        let fact = base.iter().next().unwrap();
        assert_eq!(fact.predicate, "hacl");
        assert_eq!(fact.args, vec!["adminPC1", "cameraA", "tcp", "22"]);
    }

    #[test]
    fn empty_text_is_empty_base() {
        assert!(parse_fact_text("").unwrap().is_empty());
        assert!(parse_fact_text("% just a comment\n").unwrap().is_empty());
    }

    #[test]
    fn quoting_round_trip() {
        let mut base = FactBase::new();
        base.insert(Fact::new("residesOn", &["intergalactic-vpn-gw", "web-ui", "2.4.12"]));
        let text = serialize_facts(&base);
        assert_eq!(
            text,
            "residesOn('intergalactic-vpn-gw','web-ui','2.4.12').\n"
        );
        assert_eq!(parse_fact_text(&text).unwrap(), base);
    }

    #[test]
    fn variable_in_fact_rejected() {
        let err = parse_fact_text("hasIP(X,host1).").unwrap_err();
        assert!(matches!(err, FactError::Syntax { .. }));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_fact_text("hacl(a,b,").unwrap_err();
        match err {
            FactError::Syntax { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_topology_parses() {
        let schema = parse_topology(r#"{"nodes": [], "links": []}"#).unwrap();
        assert!(schema.nodes.is_empty());
        assert!(schema.links.is_empty());
    }

    #[test]
    fn dangling_link_reference_is_cited() {
        let doc = r#"{
            "nodes": [{"id": "a", "class": "host"}],
            "links": [{"a": "a", "b": "x9"}]
        }"#;
        let err = parse_topology(doc).unwrap_err();
        assert!(err.to_string().contains("x9"), "got: {err}");
    }

    #[test]
    fn one_host_one_service_emits_two_facts() {
        let doc = r#"{
            "nodes": [{"id": "h1", "class": "host", "os": "linux"}],
            "interfaces": [{"node": "h1", "name": "eth0", "address": "10.0.0.1"}],
            "services": [{"node": "h1", "software": "sshd", "protocol": "tcp",
                          "port": "22", "account": "root"}]
        }"#;
        let schema = parse_topology(doc).unwrap();
        let base = emit_topology_facts(&schema);
        assert_eq!(base.len(), 2);
        assert!(base.contains(&Fact::new("hasIP", &["10.0.0.1", "h1"])));
        assert!(base.contains(&Fact::new(
            "networkService",
            &["h1", "sshd", "tcp", "22", "root"]
        )));
    }

    #[test]
    fn emission_uses_only_topology_predicates() {
        let doc = r#"{
            "nodes": [{"id": "h1", "class": "host"}, {"id": "h2", "class": "host"}],
            "links": [{"a": "h1", "b": "h2"}],
            "software": [{"node": "h1", "software": "smbV1", "version": "ver1"}],
            "acls": [{"src": "h1", "dst": "h2", "protocol": "tcp", "port": "445"}],
            "subnets": [{"name": "lan", "members": ["h1", "h2"], "virtual_ports": ["vp0"]}],
            "bindings": [{"flow": "f1", "src_host": "h1", "path": "h1-h2"}]
        }"#;
        let base = emit_topology_facts(&parse_topology(doc).unwrap());
        for fact in base.iter() {
            assert!(
                TOPOLOGY_PREDICATES.contains(&fact.predicate.as_str()),
                "unexpected predicate {}",
                fact.predicate
            );
        }
        // one fact per schema row
        assert_eq!(base.len(), 1 + 1 + 1 + 2 + 1 + 1);
    }

    #[test]
    fn vuln_mapping_matches_pairs() {
        let inventory = vec![
            SoftwareRow {
                node: "vpn-gw".into(),
                software: "intergalactic-web-ui".into(),
                version: "2.4.12".into(),
            },
            SoftwareRow {
                node: "h".into(),
                software: "leftpad".into(),
                version: "1.0".into(),
            },
        ];
        let db = vec![VulnRecord {
            cve_id: "cve-2023-27524".into(),
            software: "intergalactic-web-ui".into(),
            version: "2.4.12".into(),
            access_vector: "network".into(),
            lose_types: "privEscalation".into(),
            severity: "critical".into(),
        }];
        let mapping = map_vulnerabilities(&inventory, &db);
        assert_eq!(mapping.facts.len(), 1);
        let fact = mapping.facts.iter().next().unwrap();
        assert_eq!(fact.predicate, VUL_EXISTS);
        assert_eq!(fact.args[0], "cve-2023-27524");
        assert_eq!(mapping.unmatched.len(), 1);
        assert_eq!(mapping.unmatched[0].software, "leftpad");
    }

    #[test]
    fn vuln_mapping_smb_fixture() {
        let inventory = vec![SoftwareRow {
            node: "h".into(),
            software: "smbV1".into(),
            version: "ver1".into(),
        }];
        let db = vec![VulnRecord {
            cve_id: "cve_2017_0144".into(),
            software: "smbV1".into(),
            version: "ver1".into(),
            access_vector: "network".into(),
            lose_types: "caLoss".into(),
            severity: "critical".into(),
        }];
        let mapping = map_vulnerabilities(&inventory, &db);
        assert!(mapping.facts.contains(&Fact::new(
            VUL_EXISTS,
            &["cve_2017_0144", "smbV1", "ver1", "network", "caLoss", "critical"]
        )));
    }

    #[test]
    fn empty_inventory_empty_mapping() {
        let mapping = map_vulnerabilities(&[], &[]);
        assert!(mapping.facts.is_empty());
        assert!(mapping.unmatched.is_empty());
    }
}
