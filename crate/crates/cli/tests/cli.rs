use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn samples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples")
}

fn meshplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshplan"))
        .args(args)
        .current_dir(samples())
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

const SCENARIO: [&str; 10] = [
    "--users",
    "200",
    "--rb-per-call",
    "3",
    "--rate",
    "1/60",
    "--holding",
    "1.5",
    "--capacity-mbps",
    "0.7",
];

#[test]
fn every_json_output_carries_tool_version() {
    let version = env!("CARGO_PKG_VERSION");
    let mut blocking = vec!["blocking", "--format", "json"];
    blocking.extend(SCENARIO);
    let mut simulate = vec!["simulate", "--calls", "20000", "--warmup", "1000"];
    simulate.extend(SCENARIO);
    for args in [
        vec!["maxflow", "network9.graph"],
        vec!["dimension", "mesh9.mesh"],
        blocking,
        simulate,
        vec!["sweep", "blocking-vs-users.toml", "--format", "json"],
    ] {
        assert_eq!(json(&meshplan(&args))["tool_version"], version, "{args:?}");
    }
}

#[test]
fn blocking_table_for_reference_scenario() {
    let mut args = vec!["blocking"];
    args.extend(SCENARIO);
    let out = meshplan(&args);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "A=15 N=25 k=8 B=0.519256\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        meshplan(&["maxflow", "missing.graph"]).status.code(),
        Some(1)
    );
    assert_eq!(meshplan(&["maxflow", "mesh9.mesh"]).status.code(), Some(1));
    assert_eq!(
        meshplan(&["maxflow", "network9.graph", "--engine", "push-relabel"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(meshplan(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        meshplan(&["blocking", "--users", "10"]).status.code(),
        Some(1)
    );
    assert_eq!(meshplan(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let stranded = dir.path().join("stranded.mesh");
    std::fs::write(
        &stranded,
        "nodes 3\nsink 3\noffer 1 2\noffer 2 1\nlink 2 3 0\n",
    )
    .unwrap();
    let out = meshplan(&["dimension", stranded.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn flags_override_config() {
    let config = samples().join("meshplan.toml");
    let config = config.to_str().unwrap();
    let base = json(&meshplan(&[
        "--config", config, "blocking", "--format", "json",
    ]));
    assert_eq!(base["offered_erlangs"], 15.0);
    assert_eq!(base["channels"], 8);
    let over = json(&meshplan(&[
        "--config", config, "blocking", "--format", "json", "--users", "100",
    ]));
    assert_eq!(over["offered_erlangs"], 7.5);

    let dim = json(&meshplan(&["--config", config, "dimension", "mesh9.mesh"]));
    assert_eq!(dim["granularity_kbps"], 250);
    let dim = json(&meshplan(&[
        "--config",
        config,
        "dimension",
        "mesh9.mesh",
        "--granularity-kbps",
        "1000",
    ]));
    assert_eq!(dim["granularity_kbps"], 1000);
    assert_eq!(
        json(&meshplan(&[
            "--config",
            config,
            "maxflow",
            "network9.graph"
        ]))["engine"],
        "dinic"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[blocking]\nuser = 3\n").unwrap();
    let out = meshplan(&["--config", path.to_str().unwrap(), "blocking"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_reports_runs_and_pooled_counts() {
    let out = json(&meshplan(&[
        "simulate",
        "--offered",
        "5",
        "--channels",
        "10",
        "--calls",
        "30000",
        "--warmup",
        "5000",
        "--replications",
        "3",
        "--seed",
        "9",
    ]));
    let runs = out["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(out["pooled"]["calls_observed"], 75_000);
    assert_eq!(out["pooled"]["seed"], 9);
    let blocked: u64 = runs
        .iter()
        .map(|r| r["calls_blocked"].as_u64().unwrap())
        .sum();
    assert_eq!(out["pooled"]["calls_blocked"], blocked);
}

#[test]
fn dimension_trace_ends_at_optimum() {
    let out = json(&meshplan(&[
        "dimension",
        "mesh9.mesh",
        "--granularity-kbps",
        "100",
    ]));
    let trace = out["trace"].as_array().unwrap();
    assert_eq!(trace.len() as u64, out["iterations"].as_u64().unwrap());
    let optimum = out["optimal_m_kbps"].as_u64().unwrap();
    assert!(trace.iter().all(
        |s| s["feasible"].as_bool().unwrap() == (s["probe_kbps"].as_u64().unwrap() >= optimum)
    ));
    let links = out["link_capacities"].as_array().unwrap();
    assert!(links
        .iter()
        .all(|l| l["capacity_kbps"].as_u64().unwrap() <= optimum));
}

#[test]
fn sweep_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart.svg");
    let out = meshplan(&[
        "sweep",
        "blocking-vs-rb-per-call.toml",
        "--format",
        "svg",
        "--log-y",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(path).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}
