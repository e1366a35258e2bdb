//! File-driven stage driver: each stage reads its inputs (scenario files plus
//! the artifacts of earlier stages) from disk and writes its own artifacts
//! into the output directory, so the CLI can run any stage in isolation and
//! `run_all` simply chains them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ag_engine::{
    complete_missing_facts, enumerate_attack_paths, evaluate, parse_rules, AgError,
    DerivationGraph, RuleSet,
};
use crate::emu_sim::{
    bind_ability_variables, emit_debrief, emit_debrief_html, parse_debrief, parse_profile,
    run_operation, schedule_steps, BoundAbility, DebriefReport, EmuError, FaultModel,
};
use crate::fact_model::{
    emit_topology_facts, map_vulnerabilities, parse_fact_text, parse_topology,
    parse_vuln_catalog, serialize_facts, FactBase, FactError, SoftwareRow, TopologySchema,
};
use crate::metrics::{
    compare_debriefs, effectiveness_csv, utility_csv, utility_report, EffectivenessReport64,
    EnergyParams, MetricsError, ResourceTrace64, TopologyStats, UtilityReport64,
};
use crate::path_reducer::{reduce_graph, PolicyError, ReductionPolicy};
use crate::scenario_mapper::{
    map_techniques_to_irs, parse_technique_list, MapError, MappingTables,
};
use crate::twin_builder::{
    build_twin_plan, complete_connectivity, instantiate_plan, path_host_sequences,
    reduced_topology, sanity_validate, select_assets, MockBackend, TemplateCatalog, TwinError,
    TwinPlan, ValidationReport, ValidationStatus,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Fact(#[from] FactError),
    #[error(transparent)]
    Ag(#[from] AgError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Twin(#[from] TwinError),
    #[error(transparent)]
    Emu(#[from] EmuError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("attack graph is empty: no goal is derivable from the facts")]
    EmptyGraph,
    #[error("twin sanity validation failed, see validation.json")]
    ValidationFailed,
}

impl PipelineError {
    /// Stable process exit code per failure family:
    /// 2 malformed input, 3 twin infeasibility, 4 abort on missing
    /// ability/template/placeholder/assumption, 5 validation failure,
    /// 6 empty attack graph, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use PipelineError::*;
        match self {
            Fact(_) | Map(_) | Policy(_) => 2,
            Ag(AgError::UnresolvedEnvironmental(_)) => 4,
            Ag(_) => 2,
            Twin(TwinError::Infeasible { .. }) => 3,
            Twin(TwinError::Plan(_)) => 2,
            Twin(_) => 4,
            Emu(EmuError::Profile(_)) | Emu(EmuError::FaultModel(_)) => 2,
            Emu(_) => 4,
            Metrics(MetricsError::Trace(_)) => 2,
            Metrics(_) => 4,
            ValidationFailed => 5,
            EmptyGraph => 6,
            Io { .. } => 1,
        }
    }
}

/// Every input the pipeline can consume. Optional inputs gate optional work:
/// no traces means no utility table, no profile means no emulation.
#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub topology: PathBuf,
    pub vulns: PathBuf,
    /// A directory of `.pl` interaction-rule files, or one file.
    pub rules: PathBuf,
    pub assumptions: PathBuf,
    pub abilities: Option<PathBuf>,
    pub map_abilities: Option<PathBuf>,
    pub map_irs: Option<PathBuf>,
    /// Ordered technique list; with `map_irs` it narrows which rule files load.
    pub techniques: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub faults: Option<PathBuf>,
    pub policy: Option<PathBuf>,
    pub trace_full: Option<PathBuf>,
    pub trace_twin: Option<PathBuf>,
    pub seed: u64,
    pub skip_reduce: bool,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and merge the interaction rules. When a technique list and an IR
/// mapping table are both present, only the rule files those techniques map
/// to are loaded; otherwise every `.pl` file in the directory (sorted by
/// name) or the single given file is.
pub fn load_rules(cfg: &PipelineConfig) -> Result<RuleSet, PipelineError> {
    let mut files: Vec<PathBuf> = Vec::new();
    if cfg.rules.is_dir() {
        let selected: Option<Vec<String>> =
            match (cfg.techniques.as_ref(), cfg.map_irs.as_ref()) {
                (Some(techniques), Some(map)) => {
                    let list = parse_technique_list(&read(techniques)?)?;
                    let mut tables = MappingTables::default();
                    tables.load_ir_table(&read(map)?)?;
                    Some(map_techniques_to_irs(&list, &tables).0)
                }
                _ => None,
            };
        match selected {
            Some(names) => {
                for name in names {
                    files.push(cfg.rules.join(name));
                }
            }
            None => {
                let entries = fs::read_dir(&cfg.rules).map_err(|source| PipelineError::Io {
                    path: cfg.rules.clone(),
                    source,
                })?;
                for entry in entries.flatten() {
                    let path = entry.path();
                    if path.extension().is_some_and(|e| e == "pl") {
                        files.push(path);
                    }
                }
                files.sort();
            }
        }
    } else {
        files.push(cfg.rules.clone());
    }
    let mut text = String::new();
    for file in files {
        text.push_str(&read(&file)?);
        text.push('\n');
    }
    Ok(parse_rules(&text)?)
}

/// Stage 1 output: the validated topology, its fact projection, and the
/// vulnerability mapping.
#[derive(Debug, Clone)]
pub struct FactsStage {
    pub schema: TopologySchema,
    pub topo_facts: FactBase,
    pub vul_facts: FactBase,
    pub unmatched: Vec<SoftwareRow>,
}

/// Parse and validate the topology, emit its facts, map the vulnerability
/// catalog. Writes `facts.pl`, `vul.pl` and `unmatched_software.json`.
pub fn stage_facts(cfg: &PipelineConfig) -> Result<FactsStage, PipelineError> {
    let schema = parse_topology(&read(&cfg.topology)?)?;
    schema.validate()?;
    let topo_facts = emit_topology_facts(&schema);
    let vulns = parse_vuln_catalog(&read(&cfg.vulns)?)?;
    let mapping = map_vulnerabilities(&schema.software, &vulns);
    write(&cfg.out("facts.pl"), &serialize_facts(&topo_facts))?;
    write(&cfg.out("vul.pl"), &serialize_facts(&mapping.facts))?;
    write(
        &cfg.out("unmatched_software.json"),
        &serde_json::to_string_pretty(&mapping.unmatched).expect("rows serialize"),
    )?;
    Ok(FactsStage {
        schema,
        topo_facts,
        vul_facts: mapping.facts,
        unmatched: mapping.unmatched,
    })
}

/// What fact completion did, persisted as `completion.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionSummary {
    pub facts_before: usize,
    pub facts_injected: usize,
    pub facts_after: usize,
    pub environmental_predicates: Vec<String>,
}

/// Stage 2 output: the completed fact base and the evaluated graph.
#[derive(Debug, Clone)]
pub struct AgStage {
    pub rules: RuleSet,
    pub completed: FactBase,
    pub completion: CompletionSummary,
    pub graph: DerivationGraph,
}

/// Complete missing environmental facts and evaluate the attack graph.
/// Reads `facts.pl`/`vul.pl`; writes `completed.pl`, `completion.json`,
/// `graph.json` and `graph.txt`.
pub fn stage_ag(cfg: &PipelineConfig) -> Result<AgStage, PipelineError> {
    let rules = load_rules(cfg)?;
    let topo_facts = parse_fact_text(&read(&cfg.out("facts.pl"))?)?;
    let vul_facts = parse_fact_text(&read(&cfg.out("vul.pl"))?)?;
    let assumptions = parse_fact_text(&read(&cfg.assumptions)?)?;

    let (completed, report) = complete_missing_facts(&rules, &topo_facts, &assumptions)?;
    let summary = CompletionSummary {
        facts_before: topo_facts.len(),
        facts_injected: report.injected.len(),
        facts_after: completed.len(),
        environmental_predicates: report.environmental.clone(),
    };

    let mut evaluation_base = completed.clone();
    evaluation_base.extend(&vul_facts);
    let graph = evaluate(&evaluation_base, &rules);
    if graph.is_empty() {
        return Err(PipelineError::EmptyGraph);
    }

    write(&cfg.out("completed.pl"), &serialize_facts(&completed))?;
    write(
        &cfg.out("completion.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    write(&cfg.out("graph.json"), &graph.to_json())?;
    write(&cfg.out("graph.txt"), &graph.to_text())?;
    Ok(AgStage {
        rules,
        completed,
        completion: summary,
        graph,
    })
}

fn load_policy(cfg: &PipelineConfig) -> Result<ReductionPolicy, PipelineError> {
    match cfg.policy.as_ref() {
        Some(path) => Ok(ReductionPolicy::from_json(&read(path)?)?),
        None => Ok(ReductionPolicy::default()),
    }
}

/// Reduce `graph.json` under the policy (identity when `--skip-reduce`);
/// writes `reduced.json`.
pub fn stage_reduce(cfg: &PipelineConfig) -> Result<DerivationGraph, PipelineError> {
    let graph = DerivationGraph::from_json(&read(&cfg.out("graph.json"))?)
        .map_err(TwinError::Plan)?;
    let reduced = if cfg.skip_reduce {
        graph
    } else {
        reduce_graph(&graph, &load_policy(cfg)?)
    };
    write(&cfg.out("reduced.json"), &reduced.to_json())?;
    Ok(reduced)
}

/// Stage 4 output: the plan, its validation, and the twin's own attack graph
/// derived from the reduced topology (reduced under the same policy).
#[derive(Debug, Clone)]
pub struct TwinStage {
    pub plan: TwinPlan,
    pub validation: ValidationReport,
    pub twin_graph: DerivationGraph,
    pub twin_reduced: DerivationGraph,
}

/// Select assets from the reduced graph, complete connectivity, build and
/// instantiate the plan on the mock backend, sanity-validate it, and
/// re-derive the attack graph inside the twin. Writes `plan.json`,
/// `validation.json`, `twin_graph.json`, `twin_reduced.json` and the mock
/// session `twin_session.json`.
pub fn stage_twin(cfg: &PipelineConfig) -> Result<TwinStage, PipelineError> {
    let schema = parse_topology(&read(&cfg.topology)?)?;
    let reduced = DerivationGraph::from_json(&read(&cfg.out("reduced.json"))?)
        .map_err(TwinError::Plan)?;
    let catalog = match cfg.templates.as_ref() {
        Some(path) => TemplateCatalog::from_json(&read(path)?)?,
        None => TemplateCatalog::default(),
    };

    let assets = select_assets(&reduced, &schema)?;
    let paths = enumerate_attack_paths(&reduced);
    let host_paths = path_host_sequences(&reduced, &paths, &schema);
    let assets = complete_connectivity(&assets, &host_paths, &schema)?;
    let plan = build_twin_plan(&assets, &schema, &catalog)?;

    let mut backend = MockBackend::with_session_file(cfg.out("twin_session.json"));
    instantiate_plan(&plan, &mut backend)?;
    let (goal_from, goal_to) = host_paths
        .iter()
        .find(|hosts| hosts.len() >= 2)
        .map(|hosts| (hosts[0].clone(), hosts[hosts.len() - 1].clone()))
        .or_else(|| {
            plan.nodes
                .first()
                .map(|n| (n.id.clone(), plan.nodes.last().unwrap().id.clone()))
        })
        .unwrap_or_default();
    let validation = sanity_validate(&plan, &mut backend, &goal_from, &goal_to)?;

    // re-derive the graph from the twin's own (projected) topology
    let twin_schema = reduced_topology(&plan, &schema);
    let mut twin_facts = emit_topology_facts(&twin_schema);
    let rules = load_rules(cfg)?;
    let assumptions = parse_fact_text(&read(&cfg.assumptions)?)?;
    let (completed, _) = complete_missing_facts(&rules, &twin_facts, &assumptions)?;
    twin_facts = completed;
    let vulns = parse_vuln_catalog(&read(&cfg.vulns)?)?;
    twin_facts.extend(&map_vulnerabilities(&twin_schema.software, &vulns).facts);
    let twin_graph = evaluate(&twin_facts, &rules);
    let twin_reduced = if cfg.skip_reduce {
        twin_graph.clone()
    } else {
        reduce_graph(&twin_graph, &load_policy(cfg)?)
    };

    write(&cfg.out("plan.json"), &plan.to_json())?;
    write(
        &cfg.out("validation.json"),
        &serde_json::to_string_pretty(&validation).expect("report serializes"),
    )?;
    write(&cfg.out("twin_graph.json"), &twin_graph.to_json())?;
    write(&cfg.out("twin_reduced.json"), &twin_reduced.to_json())?;
    Ok(TwinStage {
        plan,
        validation,
        twin_graph,
        twin_reduced,
    })
}

/// Bind the adversary profile against the ability catalog, the completed
/// facts and the plan. Writes `bound.json`.
pub fn stage_bind(cfg: &PipelineConfig) -> Result<Vec<BoundAbility>, PipelineError> {
    let profile_path = cfg.profile.as_ref().ok_or_else(missing_profile)?;
    let abilities_path = cfg.abilities.as_ref().ok_or_else(missing_abilities)?;
    let profile = parse_profile(&read(profile_path)?)?;
    let catalog = crate::scenario_mapper::parse_ability_catalog(&read(abilities_path)?)?;
    let facts = parse_fact_text(&read(&cfg.out("completed.pl"))?)?;
    let plan = TwinPlan::from_json(&read(&cfg.out("plan.json"))?)?;
    let bound = bind_ability_variables(&profile, &catalog, &facts, &plan)?;
    write(
        &cfg.out("bound.json"),
        &serde_json::to_string_pretty(&bound).expect("bound steps serialize"),
    )?;
    Ok(bound)
}

fn missing_profile() -> PipelineError {
    PipelineError::Emu(EmuError::MissingAbility(
        "no adversary profile given (--profile)".into(),
    ))
}

fn missing_abilities() -> PipelineError {
    PipelineError::Emu(EmuError::MissingAbility(
        "no ability catalog given (--abilities)".into(),
    ))
}

/// The paired debriefs of one emulation run.
#[derive(Debug, Clone)]
pub struct EmulateStage {
    pub full: DebriefReport,
    pub twin: DebriefReport,
}

/// Run the bound profile twice, against the full reduced graph and against
/// the twin's reduced graph, with the same fault model and seed. Writes
/// `debrief_full.json`/`.html` and `debrief_twin.json`/`.html`.
pub fn stage_emulate(cfg: &PipelineConfig) -> Result<EmulateStage, PipelineError> {
    let bound: Vec<BoundAbility> = serde_json::from_str(&read(&cfg.out("bound.json"))?)
        .map_err(EmuError::FaultModel)?;
    let faults = match cfg.faults.as_ref() {
        Some(path) => FaultModel::from_json(&read(path)?)?,
        None => FaultModel::default(),
    };
    let profile = parse_profile(&read(
        cfg.profile.as_ref().ok_or_else(missing_profile)?,
    )?)?;

    let mut debriefs = Vec::new();
    for (suffix, graph_file) in [("full", "reduced.json"), ("twin", "twin_reduced.json")] {
        let graph = DerivationGraph::from_json(&read(&cfg.out(graph_file))?)
            .map_err(TwinError::Plan)?;
        let schedule = schedule_steps(&graph, &bound)?;
        let operation_id = format!("{}-{suffix}", profile.operation);
        let report = run_operation(&operation_id, &graph, &schedule, &faults, cfg.seed);
        write(
            &cfg.out(&format!("debrief_{suffix}.json")),
            &emit_debrief(&report),
        )?;
        write(
            &cfg.out(&format!("debrief_{suffix}.html")),
            &emit_debrief_html(&report),
        )?;
        debriefs.push(report);
    }
    let twin = debriefs.pop().expect("two debriefs");
    let full = debriefs.pop().expect("two debriefs");
    Ok(EmulateStage { full, twin })
}

/// Stage 7 output; `utility` stays `None` without trace inputs.
#[derive(Debug, Clone)]
pub struct MetricsStage {
    pub utility: Option<UtilityReport64>,
    pub effectiveness: EffectivenessReport64,
}

/// Compare the paired debriefs and graphs, and (when traces are given) the
/// resource footprints. Writes `effectiveness.csv` and maybe `utility.csv`.
pub fn stage_metrics(cfg: &PipelineConfig) -> Result<MetricsStage, PipelineError> {
    let full = parse_debrief(&read(&cfg.out("debrief_full.json"))?)?;
    let twin = parse_debrief(&read(&cfg.out("debrief_twin.json"))?)?;
    let full_graph = DerivationGraph::from_json(&read(&cfg.out("reduced.json"))?)
        .map_err(TwinError::Plan)?;
    let twin_graph = DerivationGraph::from_json(&read(&cfg.out("twin_reduced.json"))?)
        .map_err(TwinError::Plan)?;
    let effectiveness: EffectivenessReport64 = compare_debriefs(
        &full,
        &twin,
        &full_graph.labeled_edges(),
        &twin_graph.labeled_edges(),
    );
    write(&cfg.out("effectiveness.csv"), &effectiveness_csv(&effectiveness))?;

    let utility = match (cfg.trace_full.as_ref(), cfg.trace_twin.as_ref()) {
        (Some(full_trace), Some(twin_trace)) => {
            let schema = parse_topology(&read(&cfg.topology)?)?;
            let plan = TwinPlan::from_json(&read(&cfg.out("plan.json"))?)?;
            let report = utility_report(
                TopologyStats::new(schema.nodes.len(), schema.links.len()),
                TopologyStats::new(plan.host_count(), plan.link_count()),
                &ResourceTrace64::parse_csv(&read(full_trace)?)?,
                &ResourceTrace64::parse_csv(&read(twin_trace)?)?,
                EnergyParams::default(),
            )?;
            write(&cfg.out("utility.csv"), &utility_csv(&report))?;
            Some(report)
        }
        _ => None,
    };
    Ok(MetricsStage {
        utility,
        effectiveness,
    })
}

/// Everything a full run produced, for programmatic callers.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub facts: FactsStage,
    pub ag: AgStage,
    pub reduced: DerivationGraph,
    pub twin: TwinStage,
    pub bound: Vec<BoundAbility>,
    pub emulation: Option<EmulateStage>,
    pub metrics: Option<MetricsStage>,
}

/// Run every stage in order. Emulation and metrics only run when a profile
/// and ability catalog are configured. A failed twin validation aborts.
pub fn run_all(cfg: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let facts = stage_facts(cfg)?;
    let ag = stage_ag(cfg)?;
    let reduced = stage_reduce(cfg)?;
    let twin = stage_twin(cfg)?;
    if twin.validation.status == ValidationStatus::Failed {
        return Err(PipelineError::ValidationFailed);
    }
    let (bound, emulation, metrics) =
        if cfg.profile.is_some() && cfg.abilities.is_some() {
            let bound = stage_bind(cfg)?;
            let emulation = stage_emulate(cfg)?;
            let metrics = stage_metrics(cfg)?;
            (bound, Some(emulation), Some(metrics))
        } else {
            (Vec::new(), None, None)
        };
    Ok(RunSummary {
        facts,
        ag,
        reduced,
        twin,
        bound,
        emulation,
        metrics,
    })
}
