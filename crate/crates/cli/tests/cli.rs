//! End-to-end CLI checks: artifacts land in the output directory, SCYTAG_OUT
//! is honored, and each failure class maps to its own exit code.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn uk_args(out: &Path) -> Vec<String> {
    let dir = fixtures().join("uk_office");
    let arg = |flag: &str, p: PathBuf| vec![flag.to_string(), p.display().to_string()];
    [
        arg("--topology", dir.join("topology.json")),
        arg("--vulns", dir.join("vulns.csv")),
        arg("--rules", dir.join("irs")),
        arg("--assumptions", dir.join("assumptions.pl")),
        arg("--abilities", dir.join("abilities.yml")),
        arg("--map-abilities", dir.join("map_abilities.csv")),
        arg("--map-irs", dir.join("map_irs.csv")),
        arg("--techniques", dir.join("techniques.txt")),
        arg("--templates", dir.join("templates.json")),
        arg("--profile", dir.join("profile.yml")),
        arg("--faults", dir.join("faults.json")),
        arg("--policy", fixtures().join("policy.json")),
        arg("--trace-full", dir.join("traces/full.csv")),
        arg("--trace-twin", dir.join("traces/twin.csv")),
        arg("--out", out.to_path_buf()),
    ]
    .concat()
}

fn scytag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scytag"))
}

#[test]
fn all_writes_every_artifact() {
    let out = tempfile::tempdir().unwrap();
    let status = scytag()
        .arg("all")
        .args(uk_args(out.path()))
        .status()
        .unwrap();
    assert!(status.success());
    for artifact in [
        "facts.pl",
        "vul.pl",
        "completed.pl",
        "completion.json",
        "graph.json",
        "graph.txt",
        "reduced.json",
        "plan.json",
        "validation.json",
        "twin_graph.json",
        "bound.json",
        "debrief_full.json",
        "debrief_twin.html",
        "effectiveness.csv",
        "utility.csv",
    ] {
        assert!(
            out.path().join(artifact).is_file(),
            "missing artifact {artifact}"
        );
    }
}

#[test]
fn scytag_out_env_sets_the_output_directory() {
    let out = tempfile::tempdir().unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--out").unwrap();
    args.drain(flag..flag + 2);
    let status = scytag()
        .arg("facts")
        .args(args)
        .env("SCYTAG_OUT", out.path())
        .current_dir(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.path().join("facts.pl").is_file());
}

#[test]
fn malformed_topology_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("topology.json");
    std::fs::write(&bad, "not json at all").unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--topology").unwrap();
    args[flag + 1] = bad.display().to_string();
    let status = scytag().arg("facts").args(args).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unsatisfiable_goal_exits_6() {
    let out = tempfile::tempdir().unwrap();
    let rules_dir = out.path().join("irs");
    std::fs::create_dir(&rules_dir).unwrap();
    std::fs::write(
        rules_dir.join("r01_subnet.pl"),
        "% RULE 2 (Subnet membership.)\n\
         inSubnet(H,S) :- isInSubnet(S,H).\n\
         attackGoal(inSubnet(noSuchHost,vpn)).\n",
    )
    .unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--rules").unwrap();
    args[flag + 1] = rules_dir.display().to_string();
    // technique narrowing only applies to the fixture rule files
    let flag = args.iter().position(|a| a == "--techniques").unwrap();
    args.drain(flag..flag + 2);
    let flag = args.iter().position(|a| a == "--map-irs").unwrap();
    args.drain(flag..flag + 2);
    let status = scytag().arg("all").args(args).status().unwrap();
    assert_eq!(status.code(), Some(6));
}

#[test]
fn unroutable_twin_exits_3() {
    let out = tempfile::tempdir().unwrap();
    let text =
        std::fs::read_to_string(fixtures().join("uk_office/topology.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["links"] = serde_json::json!([]);
    let isolated = out.path().join("topology.json");
    std::fs::write(&isolated, serde_json::to_string(&doc).unwrap()).unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--topology").unwrap();
    args[flag + 1] = isolated.display().to_string();
    let status = scytag().arg("all").args(args).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn missing_template_exits_4() {
    let out = tempfile::tempdir().unwrap();
    let empty = out.path().join("templates.json");
    std::fs::write(&empty, "{}").unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--templates").unwrap();
    args[flag + 1] = empty.display().to_string();
    let status = scytag().arg("all").args(args).status().unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn missing_ability_exits_4() {
    let out = tempfile::tempdir().unwrap();
    let sparse = out.path().join("abilities.yml");
    std::fs::write(
        &sparse,
        "- name: noop\n  \
          ability_number: unrelated-01\n  \
          technique: T1000\n  \
          technique_name: Noop\n  \
          type: exploit\n  \
          platform: linux\n  \
          executor: sh\n  \
          command: \"true\"\n",
    )
    .unwrap();
    let mut args = uk_args(out.path());
    let flag = args.iter().position(|a| a == "--abilities").unwrap();
    args[flag + 1] = sparse.display().to_string();
    let status = scytag().arg("all").args(args).status().unwrap();
    assert_eq!(status.code(), Some(4));
}
