use std::fs;
use std::process::Command;

use dfs_shape::harness::{Artifact, PolicyKind};
use dfs_shape::RunSummary;
use dfs_shape_cli::parse_cli;

fn parse(args: &[&str]) -> Result<dfs_shape_cli::Invocation, dfs_shape_cli::UsageError> {
    parse_cli(std::iter::once("dfs-shape").chain(args.iter().copied()), None)
}

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dfs-shape"));
    cmd.env_remove("DFS_SHAPE_SEED");
    cmd
}

#[test]
fn single_seed() {
    let inv = parse(&["--n", "1000", "--c", "2", "--seed", "7"]).unwrap();
    assert_eq!(inv.config.seeds, vec![7]);
    assert_eq!(inv.config.n, 1000);
    assert_eq!(inv.config.c, 2.0);
    assert!(!inv.curve_only);
}

#[test]
fn subcritical_with_renewals_is_rejected() {
    let err = parse(&["--c", "0.5", "--epsilon", "0.02"]).unwrap_err();
    assert!(err.message.contains("c > 1 + eta"), "{}", err.message);
    let err = parse(&["--n", "100", "--c", "0.5", "--epsilon", "0.02"]).unwrap_err();
    assert!(err.message.contains("c > 1 + eta"));
    let ok = parse(&["--n", "100", "--c", "0.5", "--emit", "trace", "--gamma", "0.01"]).unwrap();
    assert!(ok.config.emit.contains(Artifact::Trace));
}

#[test]
fn seeds_from_all_sources() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("seeds.txt");
    fs::write(&file, "# header\n11\n12 # trailing\n\n13\n").unwrap();
    let inv = parse(&["--n", "10", "--c", "2", "--seed", "5", "--seeds-file", file.to_str().unwrap()]).unwrap();
    assert_eq!(inv.config.seeds, vec![5, 11, 12, 13]);

    let inv = parse(&["--n", "10", "--c", "2", "--seed", "40", "--runs", "3"]).unwrap();
    assert_eq!(inv.config.seeds, vec![40, 41, 42]);

    let argv = ["dfs-shape", "--n", "10", "--c", "2", "--runs", "2"];
    assert_eq!(parse_cli(argv, Some("100")).unwrap().config.seeds, vec![100, 101]);
    assert_eq!(parse_cli(&argv[..5], Some("9")).unwrap().config.seeds, vec![9]);
    assert_eq!(parse_cli(&argv[..5], None).unwrap().config.seeds, vec![0]);
    assert!(parse_cli(&argv[..5], Some("x")).is_err());
    assert!(parse(&["--n", "10", "--c", "2", "--seed", "1", "--seed", "2", "--runs", "2"]).is_err());
}

#[test]
fn options_are_carried_through() {
    let inv = parse(&[
        "--n", "500", "--c", "3", "--policy", "uniform", "--epsilon", "0.05", "--eta", "0.1", "--gamma", "0.3",
        "--max-resamples", "7", "--emit", "trace,svg", "--out-dir", "/tmp/somewhere",
    ])
    .unwrap();
    let c = inv.config;
    assert_eq!(c.policy, PolicyKind::Uniform);
    assert_eq!((c.epsilon, c.eta, c.gamma, c.max_resamples), (0.05, 0.1, Some(0.3), 7));
    assert!(c.emit.contains(Artifact::Svg) && !c.emit.contains(Artifact::Curve));
    assert_eq!(c.out_dir, std::path::PathBuf::from("/tmp/somewhere"));
}

#[test]
fn range_and_type_violations() {
    for bad in [
        &["--n", "0", "--c", "2"][..],
        &["--n", "ten", "--c", "2"],
        &["--n", "10", "--c", "-1"],
        &["--n", "10", "--c", "2", "--gamma", "1.5"],
        &["--n", "10", "--c", "2", "--emit", "trace,nope"],
        &["--n", "10", "--c", "2", "--policy", "random"],
        &["--n", "10", "--c", "2", "--bogus"],
        &["--c", "2"],
    ] {
        let err = parse(bad).unwrap_err();
        assert!(!err.informational, "{bad:?}");
    }
}

#[test]
fn curve_only_needs_no_vertex_count() {
    let inv = parse(&["--c", "2", "--curve-only"]).unwrap();
    assert!(inv.curve_only);
    assert!(parse(&["--c", "0.9", "--curve-only"]).is_err());
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = binary().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_exits_2() {
    let out = binary().args(["--n", "10", "--c", "2", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curve_only_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["--c", "2", "--curve-only", "--curve-points", "50", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(text.starts_with("t,h\n"));
    assert_eq!(text.lines().count(), 51);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn full_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["--n", "5000", "--c", "2", "--seed", "3", "--seed", "4", "--emit", "trace,curve,renewals,pins,increments,comparison,svg", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["summary.json", "curve.csv", "profile_3.svg", "profile_4.svg", "seed_3/trace.csv", "seed_4/increments.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let summaries: Vec<RunSummary> = serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summaries.iter().map(|s| s.seed).collect::<Vec<_>>(), vec![3, 4]);
}

#[test]
fn all_rejected_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["--n", "200", "--c", "0.2", "--gamma", "0.5", "--max-resamples", "2", "--emit", "", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn unwritable_out_dir_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = binary().args(["--n", "100", "--c", "2", "--out-dir"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_seed_is_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .env("DFS_SHAPE_SEED", "77")
        .args(["--n", "300", "--c", "2", "--emit", "", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summaries: Vec<RunSummary> = serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summaries[0].seed, 77);
}
