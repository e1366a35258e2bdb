//! `scytag`: run the topology-to-twin pipeline, whole or stage by stage.
//!
//! Exit codes: 0 success, 2 malformed input, 3 twin infeasibility, 4 abort
//! (missing template, ability, placeholder or assumption), 5 failed sanity
//! validation, 6 empty attack graph, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scytag_core::pipeline::{
    self, PipelineConfig, PipelineError, RunSummary,
};

#[derive(Parser)]
#[command(name = "scytag", version, about = "Attack-graph driven minimal cyber twins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Topology document (JSON)
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Vulnerability catalog (CSV)
    #[arg(long)]
    vulns: Option<PathBuf>,
    /// Interaction-rule file or directory of .pl files
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Environmental assumption atoms (.pl)
    #[arg(long)]
    assumptions: Option<PathBuf>,
    /// Ability catalog (YAML)
    #[arg(long)]
    abilities: Option<PathBuf>,
    /// technique_id,ability_number mapping table (CSV)
    #[arg(long = "map-abilities")]
    map_abilities: Option<PathBuf>,
    /// technique_id,ir_file mapping table (CSV)
    #[arg(long = "map-irs")]
    map_irs: Option<PathBuf>,
    /// Ordered technique list, one id per line
    #[arg(long)]
    techniques: Option<PathBuf>,
    /// Device-class to template map (JSON)
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Adversary profile (YAML)
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Fault model (JSON)
    #[arg(long)]
    faults: Option<PathBuf>,
    /// Reduction policy (JSON)
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Resource trace of the full-topology run (CSV)
    #[arg(long = "trace-full")]
    trace_full: Option<PathBuf>,
    /// Resource trace of the twin run (CSV)
    #[arg(long = "trace-twin")]
    trace_twin: Option<PathBuf>,
    /// Deterministic seed for emulation and seeded reduction
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip attack-graph reduction
    #[arg(long = "skip-reduce")]
    skip_reduce: bool,
    /// Artifact output directory
    #[arg(long, env = "SCYTAG_OUT", default_value = "out")]
    out: PathBuf,
}

impl CommonArgs {
    fn into_config(self) -> PipelineConfig {
        PipelineConfig {
            topology: self.topology.unwrap_or_default(),
            vulns: self.vulns.unwrap_or_default(),
            rules: self.rules.unwrap_or_default(),
            assumptions: self.assumptions.unwrap_or_default(),
            abilities: self.abilities,
            map_abilities: self.map_abilities,
            map_irs: self.map_irs,
            techniques: self.techniques,
            templates: self.templates,
            profile: self.profile,
            faults: self.faults,
            policy: self.policy,
            trace_full: self.trace_full,
            trace_twin: self.trace_twin,
            seed: self.seed,
            skip_reduce: self.skip_reduce,
            out_dir: self.out,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit topology facts and map the vulnerability catalog
    Facts(CommonArgs),
    /// Complete missing facts and evaluate the attack graph
    Ag(CommonArgs),
    /// Reduce the attack graph under the policy
    Reduce(CommonArgs),
    /// Build, instantiate and validate the minimal twin plan
    Twin(CommonArgs),
    /// Bind the adversary profile to concrete twin targets
    Bind(CommonArgs),
    /// Run the emulated operation against full and twin graphs
    Emulate(CommonArgs),
    /// Compute utility and effectiveness metrics
    Metrics(CommonArgs),
    /// Run every stage in order
    All(CommonArgs),
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Facts(args) => {
            let cfg = args.into_config();
            let facts = pipeline::stage_facts(&cfg)?;
            println!(
                "facts: {} topology facts, {} vulExists, {} unmatched software rows",
                facts.topo_facts.len(),
                facts.vul_facts.len(),
                facts.unmatched.len()
            );
        }
        Command::Ag(args) => {
            let cfg = args.into_config();
            let ag = pipeline::stage_ag(&cfg)?;
            println!(
                "ag: {} -> {} facts after completion, {} graph nodes, {} goals",
                ag.completion.facts_before,
                ag.completion.facts_after,
                ag.graph.nodes.len(),
                ag.graph.goals.len()
            );
        }
        Command::Reduce(args) => {
            let cfg = args.into_config();
            let reduced = pipeline::stage_reduce(&cfg)?;
            println!("reduce: {} nodes kept", reduced.nodes.len());
        }
        Command::Twin(args) => {
            let cfg = args.into_config();
            let twin = pipeline::stage_twin(&cfg)?;
            println!(
                "twin: {} nodes, {} links, validation {:?}",
                twin.plan.host_count(),
                twin.plan.link_count(),
                twin.validation.status
            );
            if twin.validation.status == scytag_core::twin_builder::ValidationStatus::Failed
            {
                return Err(PipelineError::ValidationFailed);
            }
        }
        Command::Bind(args) => {
            let cfg = args.into_config();
            let bound = pipeline::stage_bind(&cfg)?;
            let skipped = bound.iter().filter(|b| b.skip_reason.is_some()).count();
            println!("bind: {} steps bound, {} skipped", bound.len(), skipped);
        }
        Command::Emulate(args) => {
            let cfg = args.into_config();
            let em = pipeline::stage_emulate(&cfg)?;
            println!(
                "emulate: full success {}, twin success {}",
                em.full.success, em.twin.success
            );
        }
        Command::Metrics(args) => {
            let cfg = args.into_config();
            let m = pipeline::stage_metrics(&cfg)?;
            println!("metrics: effectiveness written");
            if m.utility.is_some() {
                println!("metrics: utility written");
            }
        }
        Command::All(args) => {
            let cfg = args.into_config();
            let RunSummary {
                ag, reduced, twin, emulation, metrics, ..
            } = pipeline::run_all(&cfg)?;
            println!(
                "all: graph {} nodes ({} reduced), twin {} nodes / {} links, validation {:?}",
                ag.graph.nodes.len(),
                reduced.nodes.len(),
                twin.plan.host_count(),
                twin.plan.link_count(),
                twin.validation.status
            );
            if let Some(em) = emulation {
                println!(
                    "all: full success {}, twin success {}",
                    em.full.success, em.twin.success
                );
            }
            if metrics.is_some() {
                println!("all: metrics written");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
