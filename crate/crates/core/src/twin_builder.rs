//! Minimal viable twin construction: sweep the attack graph for the assets it
//! touches, complete physical connectivity from the full topology, map every
//! node to a backend template and validate the result against a backend.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ag_engine::{AttackPath, DerivationGraph};
use crate::fact_model::{
    AclRow, Fact, LinkRow, ServiceRow, SoftwareRow, SubnetRow, TopologySchema,
};

#[derive(Debug, Error)]
pub enum TwinError {
    #[error("attack graph references host {0:?} absent from the topology")]
    UnknownHost(String),
    #[error("no physical route between {from:?} and {to:?} in the full topology")]
    Infeasible { from: String, to: String },
    #[error("no template for device class {0:?}")]
    TemplateMissing(String),
    #[error("twin backend unreachable: {0}")]
    Backend(String),
    #[error("plan document: {0}")]
    Plan(#[from] serde_json::Error),
}

/// Why a node is in the twin. Every node must have exactly one reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    /// The node sits on an attack path of the graph.
    AttackPath,
    /// Added so consecutive attack-path hosts have a physical route.
    Completion,
    /// Default gateway of a marked host.
    Gateway,
    /// First-hop DNS or AD server of a marked host.
    DnsAd,
    /// Firewall enforcing a marked host's outbound rules.
    Firewall,
}

/// Assets retained from the full topology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssetSet {
    pub nodes: BTreeMap<String, Justification>,
    pub links: Vec<LinkRow>,
    pub services: Vec<ServiceRow>,
    pub software: Vec<SoftwareRow>,
    pub acls: Vec<AclRow>,
    pub vulnerabilities: Vec<String>,
}

impl AssetSet {
    pub fn hosts(&self) -> BTreeSet<&str> {
        self.nodes.keys().map(String::as_str).collect()
    }
}

const GATEWAY_CLASSES: [&str; 3] = ["router", "gateway", "cloud"];
const DNS_AD_CLASSES: [&str; 2] = ["dns", "ad"];
const FIREWALL_CLASS: &str = "firewall";

/// Argument positions that must name topology nodes, per topology predicate.
fn host_positions(predicate: &str) -> &'static [usize] {
    match predicate {
        "hasIP" => &[1],
        "dataFlow" => &[0, 1],
        "residesOn" => &[0],
        "networkService" => &[0],
        "hacl" => &[0, 1],
        "isInSubnet" => &[1],
        "dataBind" => &[1],
        _ => &[],
    }
}

fn adjacency(topology: &TopologySchema) -> BTreeMap<&str, Vec<&str>> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for node in &topology.nodes {
        adj.entry(node.id.as_str()).or_default();
    }
    for link in &topology.links {
        adj.entry(link.a.as_str()).or_default().push(link.b.as_str());
        adj.entry(link.b.as_str()).or_default().push(link.a.as_str());
    }
    for neighbors in adj.values_mut() {
        neighbors.sort_unstable();
    }
    adj
}

fn shortest_path<'a>(
    adj: &BTreeMap<&'a str, Vec<&'a str>>,
    from: &str,
    to: &str,
) -> Option<Vec<&'a str>> {
    let (&start, _) = adj.get_key_value(from)?;
    let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(current) = queue.pop_front() {
        if current == to {
            let mut path = vec![current];
            let mut cursor = current;
            while let Some(&p) = prev.get(cursor) {
                path.push(p);
                cursor = p;
            }
            path.reverse();
            return Some(path);
        }
        for &next in &adj[current] {
            if seen.insert(next) {
                prev.insert(next, current);
                queue.push_back(next);
            }
        }
    }
    None
}

/// Nearest node (BFS) satisfying a class predicate, excluding the start.
fn nearest_by_class<'a>(
    adj: &BTreeMap<&'a str, Vec<&'a str>>,
    topology: &TopologySchema,
    from: &str,
    wanted: impl Fn(&str) -> bool,
) -> Option<&'a str> {
    let (&start, _) = adj.get_key_value(from)?;
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(current) = queue.pop_front() {
        if current != start {
            if let Some(node) = topology.node(current) {
                if wanted(&node.class) {
                    return Some(current);
                }
            }
        }
        for &next in &adj[current] {
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    None
}

/// Breadth-first sweep of the attack graph: every topology node named by any
/// graph atom is marked, and each marked host additionally retains its
/// default gateway, first-hop DNS/AD server and enforcing firewall.
pub fn select_assets(
    graph: &DerivationGraph,
    topology: &TopologySchema,
) -> Result<AssetSet, TwinError> {
    let mut assets = AssetSet::default();
    if graph.is_empty() {
        return Ok(assets);
    }
    let node_ids = topology.node_ids();

    let mut marked: BTreeSet<&str> = BTreeSet::new();
    let mut seen_atoms: Vec<&Fact> = Vec::new();
    for node in &graph.nodes {
        let Some(atom) = node.atom.as_ref() else {
            continue;
        };
        seen_atoms.push(atom);
        for &pos in host_positions(&atom.predicate) {
            if let Some(arg) = atom.args.get(pos) {
                if !node_ids.contains(arg.as_str()) {
                    return Err(TwinError::UnknownHost(arg.clone()));
                }
            }
        }
        for arg in &atom.args {
            if let Some(&id) = node_ids.get(arg.as_str()) {
                marked.insert(id);
            }
        }
    }

    for host in &marked {
        assets
            .nodes
            .insert(host.to_string(), Justification::AttackPath);
    }

    let adj = adjacency(topology);
    for host in &marked {
        // default gateway
        let gateway =
            nearest_by_class(&adj, topology, host, |c| GATEWAY_CLASSES.contains(&c));
        if let Some(gw) = gateway {
            assets
                .nodes
                .entry(gw.to_string())
                .or_insert(Justification::Gateway);
            // the firewall enforcing this host's outbound rules: any firewall
            // on the shortest route to the gateway's upstream
            let upstream = nearest_by_class(&adj, topology, gw, |c| {
                c == FIREWALL_CLASS || c == "cloud"
            });
            if let Some(up) = upstream {
                if let Some(route) = shortest_path(&adj, host, up) {
                    for step in route {
                        if topology.node(step).map(|n| n.class.as_str())
                            == Some(FIREWALL_CLASS)
                        {
                            assets
                                .nodes
                                .entry(step.to_string())
                                .or_insert(Justification::Firewall);
                        }
                    }
                }
            }
        }
        // first-hop DNS/AD server: one sharing a subnet with the host
        for subnet in &topology.subnets {
            if !subnet.members.iter().any(|m| m == host) {
                continue;
            }
            for member in &subnet.members {
                if let Some(node) = topology.node(member) {
                    if DNS_AD_CLASSES.contains(&node.class.as_str()) {
                        assets
                            .nodes
                            .entry(member.clone())
                            .or_insert(Justification::DnsAd);
                    }
                }
            }
        }
    }

    retain_rows(&mut assets, topology, &seen_atoms);
    assets.links = induced_links(&assets, topology);
    Ok(assets)
}

/// Service, software, ACL and vulnerability rows referenced by graph atoms.
fn retain_rows(assets: &mut AssetSet, topology: &TopologySchema, atoms: &[&Fact]) {
    let mut service_keys = BTreeSet::new();
    let mut vuln_pairs = BTreeSet::new();
    let mut acl_keys = BTreeSet::new();
    for atom in atoms {
        match atom.predicate.as_str() {
            "networkService" if atom.args.len() == 5 => {
                service_keys.insert(atom.args.clone());
            }
            "vulExists" if atom.args.len() == 6 => {
                vuln_pairs.insert((atom.args[1].clone(), atom.args[2].clone()));
                assets.vulnerabilities.push(atom.args[0].clone());
            }
            "hacl" if atom.args.len() == 4 => {
                acl_keys.insert(atom.args.clone());
            }
            _ => {}
        }
    }
    assets.vulnerabilities.sort_unstable();
    assets.vulnerabilities.dedup();
    assets.services = topology
        .services
        .iter()
        .filter(|s| {
            service_keys.contains(&vec![
                s.node.clone(),
                s.software.clone(),
                s.protocol.clone(),
                s.port.clone(),
                s.account.clone(),
            ])
        })
        .cloned()
        .collect();
    assets.software = topology
        .software
        .iter()
        .filter(|s| vuln_pairs.contains(&(s.software.clone(), s.version.clone())))
        .cloned()
        .collect();
    assets.acls = topology
        .acls
        .iter()
        .filter(|a| {
            acl_keys.contains(&vec![
                a.src.clone(),
                a.dst.clone(),
                a.protocol.clone(),
                a.port.clone(),
            ])
        })
        .cloned()
        .collect();
}

fn induced_links(assets: &AssetSet, topology: &TopologySchema) -> Vec<LinkRow> {
    topology
        .links
        .iter()
        .filter(|l| assets.nodes.contains_key(&l.a) && assets.nodes.contains_key(&l.b))
        .cloned()
        .collect()
}

/// Host sequence per attack path: for each derived step, the first atom
/// argument naming a topology node, consecutive duplicates dropped.
pub fn path_host_sequences(
    graph: &DerivationGraph,
    paths: &[AttackPath],
    topology: &TopologySchema,
) -> Vec<Vec<String>> {
    let node_ids = topology.node_ids();
    let mut sequences = Vec::new();
    for path in paths {
        let mut hosts: Vec<String> = Vec::new();
        for &step in &path.steps {
            let Some(atom) = graph.node(step).atom.as_ref() else {
                continue;
            };
            let Some(host) = atom.args.iter().find(|a| node_ids.contains(a.as_str()))
            else {
                continue;
            };
            if hosts.last().map(String::as_str) != Some(host) {
                hosts.push(host.clone());
            }
        }
        sequences.push(hosts);
    }
    sequences
}

/// Add the intermediate devices (switches, routers) that consecutive
/// attack-path hosts route through, then recompute the retained links.
pub fn complete_connectivity(
    assets: &AssetSet,
    host_paths: &[Vec<String>],
    topology: &TopologySchema,
) -> Result<AssetSet, TwinError> {
    let mut out = assets.clone();
    let adj = adjacency(topology);
    let mut route_targets: Vec<(String, String)> = Vec::new();
    for hosts in host_paths {
        for pair in hosts.windows(2) {
            route_targets.push((pair[0].clone(), pair[1].clone()));
        }
    }
    // support nodes must be reachable too: route every retained gateway, DNS
    // and firewall to the nearest marked host it serves
    let marked: Vec<String> = assets
        .nodes
        .iter()
        .filter(|(_, j)| **j == Justification::AttackPath)
        .map(|(n, _)| n.clone())
        .collect();
    for (node, justification) in &assets.nodes {
        if *justification == Justification::AttackPath {
            continue;
        }
        if let Some(host) = marked.first() {
            route_targets.push((host.clone(), node.clone()));
        }
    }

    for (from, to) in route_targets {
        let route = shortest_path(&adj, &from, &to).ok_or(TwinError::Infeasible {
            from: from.clone(),
            to: to.clone(),
        })?;
        for step in route {
            out.nodes
                .entry(step.to_string())
                .or_insert(Justification::Completion);
        }
    }
    out.links = induced_links(&out, topology);
    Ok(out)
}

/// Device-class to backend template map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateCatalog(pub BTreeMap<String, String>);

impl TemplateCatalog {
    pub fn from_json(text: &str) -> Result<Self, TwinError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinNode {
    pub id: String,
    pub template: String,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub os: Option<String>,
    #[serde(default)]
    pub startup_services: Vec<ServiceRow>,
    #[serde(default)]
    pub software: Vec<SoftwareRow>,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VlanDef {
    pub name: String,
    pub vlan: u32,
    pub members: Vec<String>,
}

/// Runnable twin plan: the artifact the backend instantiates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinPlan {
    pub nodes: Vec<TwinNode>,
    pub links: Vec<(String, String)>,
    pub acls: Vec<AclRow>,
    pub vlans: Vec<VlanDef>,
    /// Twin node id to original topology host id.
    pub host_map: BTreeMap<String, String>,
    /// dataFlow pairs that must stay reachable, probed by sanity validation.
    pub required_flows: Vec<(String, String)>,
}

impl TwinPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TwinError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn host_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }
}

/// Map every asset to a template and attach startup services, software and
/// the VLAN/ACL subset.
pub fn build_twin_plan(
    assets: &AssetSet,
    topology: &TopologySchema,
    catalog: &TemplateCatalog,
) -> Result<TwinPlan, TwinError> {
    let mut plan = TwinPlan::default();
    for (id, &justification) in &assets.nodes {
        let row = topology
            .node(id)
            .ok_or_else(|| TwinError::UnknownHost(id.clone()))?;
        let template = catalog
            .0
            .get(&row.class)
            .ok_or_else(|| TwinError::TemplateMissing(row.class.clone()))?;
        plan.nodes.push(TwinNode {
            id: id.clone(),
            template: template.clone(),
            class: row.class.clone(),
            os: row.os.clone(),
            startup_services: assets
                .services
                .iter()
                .filter(|s| &s.node == id)
                .cloned()
                .collect(),
            software: assets
                .software
                .iter()
                .filter(|s| &s.node == id)
                .cloned()
                .collect(),
            justification,
        });
        plan.host_map.insert(id.clone(), id.clone());
    }
    plan.links = assets
        .links
        .iter()
        .map(|l| (l.a.clone(), l.b.clone()))
        .collect();
    plan.required_flows = plan.links.clone();
    plan.acls = assets.acls.clone();
    plan.vlans = vlan_subset(assets, &topology.subnets);
    Ok(plan)
}

fn vlan_subset(assets: &AssetSet, subnets: &[SubnetRow]) -> Vec<VlanDef> {
    let mut vlans = Vec::new();
    for subnet in subnets {
        let Some(vlan) = subnet.vlan else { continue };
        let members: Vec<String> = subnet
            .members
            .iter()
            .filter(|m| assets.nodes.contains_key(*m))
            .cloned()
            .collect();
        if !members.is_empty() {
            vlans.push(VlanDef {
                name: subnet.name.clone(),
                vlan,
                members,
            });
        }
    }
    vlans
}

/// Project the full topology onto the plan: the twin's own topology document,
/// suitable for re-deriving facts and an attack graph inside the twin.
pub fn reduced_topology(plan: &TwinPlan, full: &TopologySchema) -> TopologySchema {
    let ids: BTreeSet<&str> = plan.nodes.iter().map(|n| n.id.as_str()).collect();
    let mut out = TopologySchema {
        nodes: full
            .nodes
            .iter()
            .filter(|n| ids.contains(n.id.as_str()))
            .cloned()
            .collect(),
        interfaces: full
            .interfaces
            .iter()
            .filter(|i| ids.contains(i.node.as_str()))
            .cloned()
            .collect(),
        links: full
            .links
            .iter()
            .filter(|l| {
                plan.links
                    .iter()
                    .any(|(a, b)| (a, b) == (&l.a, &l.b) || (a, b) == (&l.b, &l.a))
            })
            .cloned()
            .collect(),
        acls: plan.acls.clone(),
        ..Default::default()
    };
    for node in &plan.nodes {
        out.software.extend(node.software.iter().cloned());
        out.services.extend(node.startup_services.iter().cloned());
    }
    for vlan in &plan.vlans {
        out.subnets.push(SubnetRow {
            name: vlan.name.clone(),
            vlan: Some(vlan.vlan),
            members: vlan.members.clone(),
            virtual_ports: Vec::new(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Backend interface and sanity validation
// ---------------------------------------------------------------------------

/// Abstract twin backend: the five operations a hypervisor adapter needs.
pub trait TwinBackend {
    fn create_node(&mut self, node: &TwinNode) -> Result<(), TwinError>;
    fn create_link(&mut self, a: &str, b: &str) -> Result<(), TwinError>;
    fn upload_startup_config(&mut self, node: &str, config: &str) -> Result<(), TwinError>;
    /// Is there a live route between the two nodes?
    fn probe_edge(&mut self, a: &str, b: &str) -> Result<bool, TwinError>;
    /// Can the attacker-side host reach the objective host?
    fn run_goal_probe(&mut self, from: &str, to: &str) -> Result<bool, TwinError>;
}

/// In-memory backend; optionally persists its session as JSON after every
/// mutation so tests can inspect what was instantiated.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct MockBackend {
    pub nodes: BTreeSet<String>,
    pub links: BTreeSet<(String, String)>,
    pub configs: BTreeMap<String, String>,
    #[serde(skip)]
    session_file: Option<std::path::PathBuf>,
    #[serde(skip)]
    pub unreachable: bool,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_session_file(path: impl Into<std::path::PathBuf>) -> Self {
        MockBackend {
            session_file: Some(path.into()),
            ..Self::default()
        }
    }

    fn persist(&self) -> Result<(), TwinError> {
        if let Some(path) = &self.session_file {
            let doc = serde_json::to_string_pretty(self)?;
            std::fs::write(path, doc).map_err(|e| TwinError::Backend(e.to_string()))?;
        }
        Ok(())
    }

    fn check_up(&self) -> Result<(), TwinError> {
        if self.unreachable {
            return Err(TwinError::Backend("connection refused".into()));
        }
        Ok(())
    }

    fn connected(&self, a: &str, b: &str) -> bool {
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for n in &self.nodes {
            adj.entry(n.as_str()).or_default();
        }
        for (x, y) in &self.links {
            adj.entry(x.as_str()).or_default().push(y.as_str());
            adj.entry(y.as_str()).or_default().push(x.as_str());
        }
        shortest_path(&adj, a, b).is_some()
    }

    /// Test hook: simulate infrastructure drift after instantiation.
    pub fn remove_link(&mut self, a: &str, b: &str) {
        self.links.remove(&(a.to_string(), b.to_string()));
        self.links.remove(&(b.to_string(), a.to_string()));
    }
}

impl TwinBackend for MockBackend {
    fn create_node(&mut self, node: &TwinNode) -> Result<(), TwinError> {
        self.check_up()?;
        self.nodes.insert(node.id.clone());
        self.persist()
    }

    fn create_link(&mut self, a: &str, b: &str) -> Result<(), TwinError> {
        self.check_up()?;
        self.links.insert((a.to_string(), b.to_string()));
        self.persist()
    }

    fn upload_startup_config(&mut self, node: &str, config: &str) -> Result<(), TwinError> {
        self.check_up()?;
        self.configs.insert(node.to_string(), config.to_string());
        self.persist()
    }

    fn probe_edge(&mut self, a: &str, b: &str) -> Result<bool, TwinError> {
        self.check_up()?;
        Ok(self.connected(a, b))
    }

    fn run_goal_probe(&mut self, from: &str, to: &str) -> Result<bool, TwinError> {
        self.check_up()?;
        Ok(self.connected(from, to))
    }
}

/// Drive the backend to build the plan out.
pub fn instantiate_plan(
    plan: &TwinPlan,
    backend: &mut dyn TwinBackend,
) -> Result<(), TwinError> {
    for node in &plan.nodes {
        backend.create_node(node)?;
        let services: Vec<String> = node
            .startup_services
            .iter()
            .map(|s| format!("{} {}:{}", s.software, s.protocol, s.port))
            .collect();
        backend.upload_startup_config(&node.id, &services.join("\n"))?;
    }
    for (a, b) in &plan.links {
        backend.create_link(a, b)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Edge,
    Goal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub kind: ProbeKind,
    pub from: String,
    pub to: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationStatus {
    Pass,
    Failed,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub status: ValidationStatus,
    pub probes: Vec<ProbeResult>,
}

/// Probe every required dataFlow edge plus one end-to-end goal probe between
/// `goal_from` and `goal_to`. Any failed probe fails the whole report.
pub fn sanity_validate(
    plan: &TwinPlan,
    backend: &mut dyn TwinBackend,
    goal_from: &str,
    goal_to: &str,
) -> Result<ValidationReport, TwinError> {
    if plan.nodes.is_empty() {
        return Ok(ValidationReport {
            status: ValidationStatus::Empty,
            probes: Vec::new(),
        });
    }
    let mut probes = Vec::new();
    for (a, b) in &plan.required_flows {
        let ok = backend.probe_edge(a, b)?;
        probes.push(ProbeResult {
            kind: ProbeKind::Edge,
            from: a.clone(),
            to: b.clone(),
            ok,
        });
    }
    let goal_ok = backend.run_goal_probe(goal_from, goal_to)?;
    probes.push(ProbeResult {
        kind: ProbeKind::Goal,
        from: goal_from.to_string(),
        to: goal_to.to_string(),
        ok: goal_ok,
    });
    let status = if probes.iter().all(|p| p.ok) {
        ValidationStatus::Pass
    } else {
        ValidationStatus::Failed
    };
    Ok(ValidationReport { status, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ag_engine::{enumerate_attack_paths, evaluate, parse_rules};
    use crate::fact_model::{parse_fact_text, parse_topology};

    fn topology() -> TopologySchema {
        parse_topology(
            r#"{
  "nodes": [
    {"id": "camA", "class": "camera"},
    {"id": "sw1", "class": "switch"},
    {"id": "dvr", "class": "dvr"},
    {"id": "r1", "class": "router"},
    {"id": "fw", "class": "firewall"},
    {"id": "cloud", "class": "cloud"},
    {"id": "spare", "class": "workstation"}
  ],
  "links": [
    {"a": "camA", "b": "sw1"},
    {"a": "sw1", "b": "dvr"},
    {"a": "sw1", "b": "r1"},
    {"a": "r1", "b": "fw"},
    {"a": "fw", "b": "cloud"},
    {"a": "r1", "b": "spare"}
  ],
  "services": [
    {"node": "dvr", "software": "sshd", "protocol": "tcp", "port": "22", "account": "root"}
  ],
  "acls": [
    {"src": "camA", "dst": "dvr", "protocol": "tcp", "port": "22"}
  ],
  "subnets": [
    {"name": "cams", "vlan": 100, "members": ["camA", "dvr"]}
  ]
}"#,
        )
        .unwrap()
    }

    fn small_graph() -> DerivationGraph {
        let rules = parse_rules(
            "reach(A,B) :- hacl(A,B,P,Q).\nattackGoal(reach(camA,dvr)).",
        )
        .unwrap();
        evaluate(
            &parse_fact_text("hacl(camA,dvr,tcp,'22').").unwrap(),
            &rules,
        )
    }

    #[test]
    fn marked_hosts_and_supports_selected() {
        let topology = topology();
        let assets = select_assets(&small_graph(), &topology).unwrap();
        assert_eq!(assets.nodes[&"camA".to_string()], Justification::AttackPath);
        assert_eq!(assets.nodes[&"dvr".to_string()], Justification::AttackPath);
        // gateway of both is r1, with fw on the route to its upstream cloud
        assert_eq!(assets.nodes[&"r1".to_string()], Justification::Gateway);
        assert_eq!(assets.nodes[&"fw".to_string()], Justification::Firewall);
        assert!(!assets.nodes.contains_key("spare"));
    }

    #[test]
    fn unknown_host_is_consistency_error() {
        let rules = parse_rules(
            "reach(A,B) :- hacl(A,B,P,Q).\nattackGoal(reach(ghost,dvr)).",
        )
        .unwrap();
        let graph = evaluate(
            &parse_fact_text("hacl(ghost,dvr,tcp,'22').").unwrap(),
            &rules,
        );
        match select_assets(&graph, &topology()) {
            Err(TwinError::UnknownHost(h)) => assert_eq!(h, "ghost"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_graph_empty_assets() {
        let assets = select_assets(&DerivationGraph::default(), &topology()).unwrap();
        assert!(assets.nodes.is_empty());
    }

    #[test]
    fn completion_adds_intermediate_switch() {
        let topology = topology();
        let graph = small_graph();
        let assets = select_assets(&graph, &topology).unwrap();
        assert!(!assets.nodes.contains_key("sw1"));
        let paths = enumerate_attack_paths(&graph);
        let sequences = path_host_sequences(&graph, &paths, &topology);
        let completed = complete_connectivity(&assets, &sequences, &topology).unwrap();
        assert_eq!(
            completed.nodes[&"sw1".to_string()],
            Justification::Completion
        );
    }

    #[test]
    fn disconnected_pair_is_infeasible() {
        let topology = parse_topology(
            r#"{"nodes": [{"id": "a", "class": "x"}, {"id": "b", "class": "x"}], "links": []}"#,
        )
        .unwrap();
        let assets = AssetSet {
            nodes: BTreeMap::from([
                ("a".to_string(), Justification::AttackPath),
                ("b".to_string(), Justification::AttackPath),
            ]),
            ..Default::default()
        };
        let err = complete_connectivity(
            &assets,
            &[vec!["a".to_string(), "b".to_string()]],
            &topology,
        )
        .unwrap_err();
        assert!(matches!(err, TwinError::Infeasible { .. }));
    }

    fn catalog() -> TemplateCatalog {
        TemplateCatalog::from_json(
            r#"{"camera": "qemu:cam-lite", "dvr": "qemu:dvr", "switch": "ovs:switch",
                "router": "qemu:vyos", "firewall": "qemu:pfsense", "cloud": "docker:cloud"}"#,
        )
        .unwrap()
    }

    fn full_plan() -> TwinPlan {
        let topology = topology();
        let graph = small_graph();
        let assets = select_assets(&graph, &topology).unwrap();
        let paths = enumerate_attack_paths(&graph);
        let sequences = path_host_sequences(&graph, &paths, &topology);
        let completed = complete_connectivity(&assets, &sequences, &topology).unwrap();
        build_twin_plan(&completed, &topology, &catalog()).unwrap()
    }

    #[test]
    fn plan_has_templates_and_vlans() {
        let plan = full_plan();
        assert_eq!(plan.host_count(), 5);
        assert_eq!(plan.link_count(), 4);
        assert!(plan.nodes.iter().all(|n| !n.template.is_empty()));
        assert_eq!(plan.vlans.len(), 1);
        assert_eq!(plan.vlans[0].vlan, 100);
        // json round trip
        assert_eq!(TwinPlan::from_json(&plan.to_json()).unwrap(), plan);
    }

    #[test]
    fn missing_template_aborts_with_class() {
        let topology = topology();
        let assets = select_assets(&small_graph(), &topology).unwrap();
        let err = build_twin_plan(&assets, &topology, &TemplateCatalog::default())
            .unwrap_err();
        match err {
            TwinError::TemplateMissing(class) => assert_eq!(class, "camera"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sanity_pass_on_faithful_mock() {
        let plan = full_plan();
        let mut backend = MockBackend::new();
        instantiate_plan(&plan, &mut backend).unwrap();
        let report = sanity_validate(&plan, &mut backend, "camA", "dvr").unwrap();
        assert_eq!(report.status, ValidationStatus::Pass);
        assert_eq!(report.probes.len(), plan.link_count() + 1);
    }

    #[test]
    fn deleted_link_detected() {
        let plan = full_plan();
        let mut backend = MockBackend::new();
        instantiate_plan(&plan, &mut backend).unwrap();
        backend.remove_link("camA", "sw1");
        let report = sanity_validate(&plan, &mut backend, "camA", "dvr").unwrap();
        assert_eq!(report.status, ValidationStatus::Failed);
        let failed: Vec<_> = report.probes.iter().filter(|p| !p.ok).collect();
        assert!(failed
            .iter()
            .any(|p| p.from == "camA" && p.to == "sw1"));
    }

    #[test]
    fn empty_plan_vacuous_pass() {
        let plan = TwinPlan::default();
        let mut backend = MockBackend::new();
        let report = sanity_validate(&plan, &mut backend, "a", "b").unwrap();
        assert_eq!(report.status, ValidationStatus::Empty);
        assert!(report.probes.is_empty());
    }

    #[test]
    fn unreachable_backend_is_infrastructure_error() {
        let plan = full_plan();
        let mut backend = MockBackend::new();
        backend.unreachable = true;
        assert!(matches!(
            instantiate_plan(&plan, &mut backend),
            Err(TwinError::Backend(_))
        ));
    }

    #[test]
    fn session_file_persisted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("session.json");
        let plan = full_plan();
        let mut backend = MockBackend::with_session_file(&path);
        instantiate_plan(&plan, &mut backend).unwrap();
        let doc = std::fs::read_to_string(&path).unwrap();
        let restored: MockBackend = serde_json::from_str(&doc).unwrap();
        assert_eq!(restored.nodes, backend.nodes);
        assert_eq!(restored.links, backend.links);
    }
}
