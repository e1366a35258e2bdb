//! Simulated adversary emulation: bind ability placeholders from attack graph
//! facts, schedule steps along the graph order and run a deterministic
//! operation with injected faults, ending in a debrief report.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ag_engine::{DerivationGraph, NodeKind};
use crate::fact_model::FactBase;
use crate::scenario_mapper::AbilityDef;
use crate::twin_builder::TwinPlan;

#[derive(Debug, Error)]
pub enum EmuError {
    #[error("profile references unknown ability {0:?}")]
    MissingAbility(String),
    #[error("cannot resolve placeholder {0:?} for host {1:?}")]
    UnresolvedPlaceholder(String, String),
    #[error("ability {0:?} is not associated with any attack graph step")]
    NoAgStep(String),
    #[error("adversary profile: {0}")]
    Profile(#[from] serde_yaml::Error),
    #[error("fault model: {0}")]
    FaultModel(#[from] serde_json::Error),
}

/// One profile entry: which ability runs, on which host, proving which
/// derived atom of the attack graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileStep {
    pub ability_number: String,
    pub host: String,
    /// Full text of the derived atom this step realizes.
    pub node: String,
}

/// Ordered ability profile, the `ukoffice_op.yml` shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryProfile {
    pub operation: String,
    pub steps: Vec<ProfileStep>,
}

pub fn parse_profile(text: &str) -> Result<AdversaryProfile, EmuError> {
    Ok(serde_yaml::from_str(text)?)
}

/// An ability with every placeholder substituted and a concrete target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundAbility {
    pub ability_number: String,
    pub technique: String,
    pub host: String,
    pub node_atom: String,
    pub command: String,
    pub platform: String,
    pub executor: String,
    /// Set when binding decided the step cannot run (platform mismatch, stub).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

/// Resolve `#{namespace.key}` placeholders against the fact base.
/// `host.ip` comes from `hasIP`, `host.name` is the target itself and
/// `cred.<key>` from `credential(Host, Key, Value)` facts.
fn resolve_placeholder(
    placeholder: &str,
    host: &str,
    facts: &FactBase,
) -> Option<String> {
    let inner = placeholder.strip_prefix("#{")?.strip_suffix('}')?;
    let (namespace, key) = inner.split_once('.')?;
    match namespace {
        "host" => match key {
            "name" => Some(host.to_string()),
            "ip" => facts
                .with_predicate("hasIP")
                .find(|f| f.args.get(1).map(String::as_str) == Some(host))
                .map(|f| f.args[0].clone()),
            _ => None,
        },
        "cred" => facts
            .with_predicate("credential")
            .find(|f| {
                f.args.first().map(String::as_str) == Some(host)
                    && f.args.get(1).map(String::as_str) == Some(key)
            })
            .map(|f| f.args[2].clone()),
        _ => None,
    }
}

/// Bind every profile step. Missing abilities and unresolvable placeholders
/// abort; platform mismatches and stub abilities are data (marked skipped).
pub fn bind_ability_variables(
    profile: &AdversaryProfile,
    catalog: &[AbilityDef],
    facts: &FactBase,
    plan: &TwinPlan,
) -> Result<Vec<BoundAbility>, EmuError> {
    let by_number: BTreeMap<&str, &AbilityDef> = catalog
        .iter()
        .map(|a| (a.ability_number.as_str(), a))
        .collect();
    let placeholder_re = Regex::new(r"#\{[a-z]+\.[a-z_]+\}").unwrap();

    let mut bound = Vec::with_capacity(profile.steps.len());
    for step in &profile.steps {
        let ability = by_number
            .get(step.ability_number.as_str())
            .ok_or_else(|| EmuError::MissingAbility(step.ability_number.clone()))?;
        let twin_host = plan
            .host_map
            .get(&step.host)
            .cloned()
            .unwrap_or_else(|| step.host.clone());

        let mut command = ability.command.clone();
        for m in placeholder_re
            .find_iter(&ability.command)
            .map(|m| m.as_str().to_string())
            .collect::<BTreeSet<_>>()
        {
            let value = resolve_placeholder(&m, &step.host, facts).ok_or_else(|| {
                EmuError::UnresolvedPlaceholder(m.clone(), step.host.clone())
            })?;
            command = command.replace(&m, &value);
        }

        let mut skip_reason = None;
        if ability.is_stub() || ability.kind == "manual" || command.is_empty() {
            skip_reason = Some("stub ability, model manually".to_string());
        } else if let Some(node) = plan.nodes.iter().find(|n| n.id == twin_host) {
            if let Some(os) = &node.os {
                if !ability.platform.is_empty()
                    && !os.eq_ignore_ascii_case(&ability.platform)
                {
                    skip_reason = Some(format!(
                        "platform mismatch: ability wants {}, node runs {}",
                        ability.platform, os
                    ));
                }
            }
        }

        bound.push(BoundAbility {
            ability_number: ability.ability_number.clone(),
            technique: ability.technique.as_str().to_string(),
            host: twin_host,
            node_atom: step.node.clone(),
            command,
            platform: ability.platform.clone(),
            executor: ability.executor.clone(),
            skip_reason,
        });
    }
    Ok(bound)
}

/// Partial execution order: graph precedence plus same-host serialization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub steps: Vec<BoundAbility>,
    /// Graph node id per step (parallel to `steps`).
    pub node_ids: Vec<usize>,
    /// Precedence pairs (i before j) over step indices.
    pub edges: BTreeSet<(usize, usize)>,
}

impl Schedule {
    /// Step index pairs with no order constraint either way.
    pub fn parallel_eligible(&self) -> Vec<(usize, usize)> {
        let before = self.closure();
        let mut out = Vec::new();
        for i in 0..self.steps.len() {
            for j in i + 1..self.steps.len() {
                if !before.contains(&(i, j)) && !before.contains(&(j, i)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn closure(&self) -> BTreeSet<(usize, usize)> {
        let mut closed = self.edges.clone();
        loop {
            let mut added = false;
            let snapshot: Vec<_> = closed.iter().copied().collect();
            for &(a, b) in &snapshot {
                for &(c, d) in &snapshot {
                    if b == c && closed.insert((a, d)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        closed
    }
}

/// Order steps by the attack graph: a step must wait for steps whose derived
/// atoms its own derivation depends on; steps sharing a host keep their
/// profile order; everything else is parallel-eligible.
pub fn schedule_steps(
    graph: &DerivationGraph,
    bound: &[BoundAbility],
) -> Result<Schedule, EmuError> {
    let mut node_ids = Vec::with_capacity(bound.len());
    for step in bound {
        let atom = crate::fact_model::parse_fact_text(&format!("{}.", step.node_atom))
            .ok()
            .and_then(|base| base.iter().next().cloned())
            .ok_or_else(|| EmuError::NoAgStep(step.ability_number.clone()))?;
        let node = graph
            .find_derived(&atom)
            .ok_or_else(|| EmuError::NoAgStep(step.ability_number.clone()))?;
        node_ids.push(node.id);
    }

    // ancestor closure over derivation edges
    let preds = graph.predecessors();
    let mut ancestors: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    fn collect(
        id: usize,
        preds: &BTreeMap<usize, Vec<usize>>,
        out: &mut BTreeMap<usize, BTreeSet<usize>>,
    ) -> BTreeSet<usize> {
        if let Some(v) = out.get(&id) {
            return v.clone();
        }
        let mut set = BTreeSet::new();
        for &p in &preds[&id] {
            set.insert(p);
            set.extend(collect(p, preds, out));
        }
        out.insert(id, set.clone());
        set
    }
    for node in graph.nodes.iter().filter(|n| n.kind == NodeKind::Derived) {
        collect(node.id, &preds, &mut ancestors);
    }

    let mut edges = BTreeSet::new();
    for i in 0..bound.len() {
        for j in 0..bound.len() {
            if i == j {
                continue;
            }
            if ancestors[&node_ids[j]].contains(&node_ids[i]) {
                edges.insert((i, j));
            }
        }
    }
    for i in 0..bound.len() {
        for j in i + 1..bound.len() {
            if bound[i].host == bound[j].host {
                edges.insert((i, j));
            }
        }
    }

    Ok(Schedule {
        steps: bound.to_vec(),
        node_ids,
        edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepStatus {
    Success,
    NetworkFail,
    ExploitFail,
    DetectionFail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub ability_number: String,
    pub technique: String,
    pub host: String,
    pub status: StepStatus,
    pub attempts: u32,
    pub start_ordinal: u64,
    pub end_ordinal: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Scripted or randomized outcomes per (host, ability_number). Keys are
/// `host/ability_number`; scripts are consumed one entry per attempt.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultModel {
    #[serde(default)]
    pub scripts: BTreeMap<String, Vec<StepStatus>>,
    #[serde(default)]
    pub network_fail_p: f64,
    #[serde(default)]
    pub exploit_fail_p: f64,
    #[serde(default)]
    pub detection_fail_p: f64,
}

impl FaultModel {
    pub fn from_json(text: &str) -> Result<Self, EmuError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Pacing defaults recorded in the debrief; simulated time is ordinal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacingConfig {
    pub base_delay_s: u64,
    pub jitter_min_s: u64,
    pub jitter_max_s: u64,
}

impl Default for PacingConfig {
    fn default() -> Self {
        PacingConfig {
            base_delay_s: 0,
            jitter_min_s: 2,
            jitter_max_s: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebriefReport {
    pub operation_id: String,
    pub steps: Vec<StepResult>,
    pub success: bool,
    /// Goal atoms reached with their whole prerequisite chain succeeded.
    pub objectives: Vec<String>,
    pub techniques: Vec<String>,
    pub config: PacingConfig,
}

const MAX_NETWORK_ATTEMPTS: u32 = 4; // initial try plus three retries

/// Run the operation: a deterministic linear extension of the schedule with
/// fault injection. NetworkFail retries, ExploitFail falls through to any
/// alternative branch, DetectionFail abandons the host.
pub fn run_operation(
    operation_id: &str,
    graph: &DerivationGraph,
    schedule: &Schedule,
    faults: &FaultModel,
    seed: u64,
) -> DebriefReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scripts = faults.scripts.clone();
    let mut ordinal: u64 = 0;
    let mut detected_hosts: BTreeSet<String> = BTreeSet::new();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    let mut results: Vec<Option<StepResult>> = vec![None; schedule.steps.len()];

    while done.len() < schedule.steps.len() {
        // smallest-index ready step: the deterministic interleaving
        let next = (0..schedule.steps.len())
            .find(|i| {
                !done.contains(i)
                    && schedule
                        .edges
                        .iter()
                        .all(|(a, b)| b != i || done.contains(a))
            })
            .expect("schedule has no cycle");
        let step = &schedule.steps[next];
        let start = ordinal;

        let result = if let Some(reason) = &step.skip_reason {
            ordinal += 1;
            StepResult {
                ability_number: step.ability_number.clone(),
                technique: step.technique.clone(),
                host: step.host.clone(),
                status: StepStatus::Skipped,
                attempts: 0,
                start_ordinal: start,
                end_ordinal: ordinal,
                reason: Some(reason.clone()),
            }
        } else if detected_hosts.contains(&step.host) {
            ordinal += 1;
            StepResult {
                ability_number: step.ability_number.clone(),
                technique: step.technique.clone(),
                host: step.host.clone(),
                status: StepStatus::Skipped,
                attempts: 0,
                start_ordinal: start,
                end_ordinal: ordinal,
                reason: Some("host abandoned after detection".to_string()),
            }
        } else {
            let key = format!("{}/{}", step.host, step.ability_number);
            let mut attempts = 0;
            let status = loop {
                attempts += 1;
                ordinal += 1;
                let outcome = match scripts.get_mut(&key) {
                    Some(script) if !script.is_empty() => script.remove(0),
                    _ => draw_outcome(faults, &mut rng),
                };
                match outcome {
                    StepStatus::NetworkFail if attempts < MAX_NETWORK_ATTEMPTS => {
                        continue;
                    }
                    other => break other,
                }
            };
            if status == StepStatus::DetectionFail {
                detected_hosts.insert(step.host.clone());
            }
            StepResult {
                ability_number: step.ability_number.clone(),
                technique: step.technique.clone(),
                host: step.host.clone(),
                status,
                attempts,
                start_ordinal: start,
                end_ordinal: ordinal,
                reason: None,
            }
        };
        results[next] = Some(result);
        done.insert(next);
    }

    let steps: Vec<StepResult> = results.into_iter().map(Option::unwrap).collect();
    let (success, objectives) = goal_reachability(graph, schedule, &steps);

    let mut techniques: Vec<String> = Vec::new();
    for s in &schedule.steps {
        if !techniques.contains(&s.technique) {
            techniques.push(s.technique.clone());
        }
    }

    DebriefReport {
        operation_id: operation_id.to_string(),
        steps,
        success,
        objectives,
        techniques,
        config: PacingConfig::default(),
    }
}

fn draw_outcome(faults: &FaultModel, rng: &mut ChaCha8Rng) -> StepStatus {
    let total = faults.network_fail_p + faults.exploit_fail_p + faults.detection_fail_p;
    if total <= 0.0 {
        return StepStatus::Success;
    }
    let draw: f64 = rng.gen();
    if draw < faults.network_fail_p {
        StepStatus::NetworkFail
    } else if draw < faults.network_fail_p + faults.exploit_fail_p {
        StepStatus::ExploitFail
    } else if draw < total {
        StepStatus::DetectionFail
    } else {
        StepStatus::Success
    }
}

/// AND/OR reachability over the graph given the step outcomes: a derived node
/// with a step holds only if that step succeeded; other derived nodes hold if
/// any application has all premises holding; facts always hold. The success
/// flag is true iff some goal holds.
pub fn goal_reachability(
    graph: &DerivationGraph,
    schedule: &Schedule,
    steps: &[StepResult],
) -> (bool, Vec<String>) {
    if graph.is_empty() {
        return (false, Vec::new());
    }
    let mut step_status: BTreeMap<usize, StepStatus> = BTreeMap::new();
    for (i, result) in steps.iter().enumerate() {
        step_status.insert(schedule.node_ids[i], result.status);
    }
    let preds = graph.predecessors();
    let mut holds: BTreeMap<usize, bool> = BTreeMap::new();
    fn eval(
        id: usize,
        graph: &DerivationGraph,
        preds: &BTreeMap<usize, Vec<usize>>,
        step_status: &BTreeMap<usize, StepStatus>,
        holds: &mut BTreeMap<usize, bool>,
    ) -> bool {
        if let Some(&v) = holds.get(&id) {
            return v;
        }
        holds.insert(id, false); // cycle guard
        let value = match graph.node(id).kind {
            NodeKind::Fact => true,
            NodeKind::RuleApp => preds[&id]
                .iter()
                .all(|&p| eval(p, graph, preds, step_status, holds)),
            NodeKind::Derived => {
                let derivable = preds[&id]
                    .iter()
                    .any(|&p| eval(p, graph, preds, step_status, holds));
                // a stepped atom needs its step to succeed on top of an
                // intact prerequisite chain
                match step_status.get(&id) {
                    Some(status) => *status == StepStatus::Success && derivable,
                    None => derivable,
                }
            }
        };
        holds.insert(id, value);
        value
    }
    let mut objectives = Vec::new();
    let mut success = false;
    for &goal in &graph.goals {
        if eval(goal, graph, &preds, &step_status, &mut holds) {
            success = true;
            objectives.push(graph.node(goal).label.clone());
        }
    }
    (success, objectives)
}

/// JSON debrief with stable field order.
pub fn emit_debrief(report: &DebriefReport) -> String {
    serde_json::to_string_pretty(report).expect("debrief serializes")
}

pub fn parse_debrief(text: &str) -> Result<DebriefReport, EmuError> {
    Ok(serde_json::from_str(text)?)
}

/// Minimal HTML rendering of the same content.
pub fn emit_debrief_html(report: &DebriefReport) -> String {
    let mut rows = String::new();
    for s in &report.steps {
        rows.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{:?}</td><td>{}</td></tr>\n",
            s.ability_number, s.technique, s.host, s.status, s.attempts
        ));
    }
    format!(
        "<html><body><h1>Operation {}</h1><p>success: {}</p>\n\
         <table><tr><th>ability</th><th>technique</th><th>host</th>\
         <th>status</th><th>attempts</th></tr>\n{rows}</table></body></html>\n",
        report.operation_id, report.success
    )
}
