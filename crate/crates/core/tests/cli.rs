use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use elastic_network::cli::fixtures;
use elastic_network::cli::format::{read_json, read_network, write_json, NetworkFile, TrajectoryFile};
use elastic_network::repar::const_speed_reparam;
use elastic_network::NetworkState;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn elnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elnet")).args(args).output().expect("elnet runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn short_config(dir: &Path, t_end: f64) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, format!("{{\"solver\": {{\"dt\": 1e-5, \"t_end\": {t_end:e}}}}}\n")).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bundled_fixtures_match_their_generators() {
    for (name, file) in fixtures::bundled().unwrap() {
        let on_disk: NetworkFile = read_json(&fixture(name)).unwrap();
        assert_eq!(on_disk, file, "{name}.json is stale");
    }
}

#[test]
fn check_exit_codes() {
    for (name, expected) in [
        ("triod_equilibrium", 0),
        ("triod_bent", 0),
        ("q4_spatial", 0),
        ("clamped_curve", 0),
        ("collinear_bad", 1),
        ("triod_fourth_order_mismatch", 1),
    ] {
        let out = elnet(&["check", "--network", s(&fixture(name))]);
        assert_eq!(code(&out), expected, "{name}: {}", stdout(&out));
    }
}

#[test]
fn check_names_the_failing_condition() {
    let out = elnet(&["check", "--network", s(&fixture("collinear_bad"))]);
    assert!(stdout(&out).contains("FAIL non-collinearity (NC)"), "{}", stdout(&out));

    let out = elnet(&["check", "--network", s(&fixture("triod_fourth_order_mismatch"))]);
    let text = stdout(&out);
    assert!(text.contains("pair (0, 1)") && text.contains("pair (0, 2)"), "{text}");
    assert!(!text.contains("pair (1, 2)"), "{text}");
}

#[test]
fn check_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = elnet(&["check", "--network", s(&fixture("triod_bent")), "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = read_json(&dir.path().join("check.json")).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["span_dimension"], 2);
}

#[test]
fn io_and_parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = elnet(&["check", "--network", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&out), 3);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&elnet(&["check", "--network", s(&bad)])), 3);
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, "{\"solver\": {\"dt\": -1}}").unwrap();
    let out = elnet(&["simulate", "--network", s(&fixture("triod_bent")), "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&out), 3);
}

#[test]
fn strict_simulation_refuses_collinear_network() {
    let dir = tempfile::tempdir().unwrap();
    let out = elnet(&["simulate", "--network", s(&fixture("collinear_bad")), "--strict", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("(NC)"), "{}", stdout(&out));
    assert!(!dir.path().join("trajectory.json").exists());
}

#[test]
fn warn_mode_runs_an_incompatible_network() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), 2e-5);
    let net = fixture("triod_fourth_order_mismatch");
    let strict = elnet(&["simulate", "--network", s(&net), "--config", s(&cfg), "--out", s(&dir.path().join("a"))]);
    assert_eq!(code(&strict), 1);
    let warn = elnet(&["simulate", "--network", s(&net), "--config", s(&cfg), "--warn", "--out", s(&dir.path().join("b"))]);
    assert_eq!(code(&warn), 0, "{}", stdout(&warn));
    assert!(stdout(&warn).contains("warning"));
    assert!(dir.path().join("b/trajectory.json").exists());
}

#[test]
fn svg_is_rejected_for_spatial_networks() {
    let dir = tempfile::tempdir().unwrap();
    let out = elnet(&["simulate", "--network", s(&fixture("q4_spatial")), "--svg", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("n = 3"));
}

#[test]
fn simulation_outputs_are_complete_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), 5e-5);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = elnet(&[
            "simulate",
            "--network",
            s(&fixture("triod_bent")),
            "--config",
            s(&cfg),
            "--svg",
            "--stride",
            "2",
            "--out",
            s(&out_dir),
        ]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    for file in ["diagnostics.csv", "trajectory.json", "final.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file} differs");
    }
    let csv = fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6, "header plus the initial state and 5 steps");
    let traj: TrajectoryFile = read_json(&a.join("trajectory.json")).unwrap();
    let steps: Vec<usize> = traj.snapshots.iter().map(|s| s.step).collect();
    assert_eq!(steps, vec![0, 2, 4, 5]);
    let frames = fs::read_dir(a.join("frames")).unwrap().count();
    assert_eq!(frames, 4);
    let (last, _) = read_network(&a.join("final.json")).unwrap();
    let states = traj.states().unwrap();
    assert_eq!(&last.curves, &states.last().unwrap().curves);
}

#[test]
fn network_files_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let (state, params) = read_network(&fixture("q4_spatial")).unwrap();
    let path = dir.path().join("copy.json");
    write_json(&path, &NetworkFile::from_state(&state, &params)).unwrap();
    let (again, params2) = read_network(&path).unwrap();
    assert_eq!(again, state);
    assert_eq!(params2, params);
}

#[test]
fn convergence_command_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, "{\"solver\": {\"dt\": 1e-4, \"t_end\": 1e-3}}").unwrap();
    let out = elnet(&[
        "convergence",
        "--network",
        s(&fixture("clamped_curve")),
        "--config",
        s(&cfg),
        "--mode",
        "time",
        "--levels",
        "1,2",
        "--reference",
        "8",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("fitted order"));
    assert!(dir.path().join("convergence.json").exists());
    let bad = elnet(&["convergence", "--network", s(&fixture("clamped_curve")), "--levels", "64,32", "--reference", "128"]);
    assert_eq!(code(&bad), 1);
}

fn write_trajectory(dir: &Path, name: &str, net: &NetworkFile, t_end: f64) -> PathBuf {
    let net_path = dir.join(format!("{name}.json"));
    write_json(&net_path, net).unwrap();
    let cfg = short_config(dir, t_end);
    let out_dir = dir.join(name);
    let out = elnet(&["simulate", "--network", s(&net_path), "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    out_dir.join("trajectory.json")
}

#[test]
fn equivalence_command_separates_reparametrizations_from_other_flows() {
    let dir = tempfile::tempdir().unwrap();
    let raw = fixtures::triod_bent(64, 0.1, fixtures::BENT_AMPLITUDE).unwrap();
    let (state, params) = raw.to_network().unwrap();
    let curves = state.curves.iter().map(|c| const_speed_reparam(c).unwrap().0).collect();
    let uniform = NetworkFile::from_state(&NetworkState::new(0.0, curves).unwrap(), &params);
    let other = fixtures::triod_bent(64, 0.1, 1.5 * fixtures::BENT_AMPLITUDE).unwrap();

    let a = write_trajectory(dir.path(), "raw", &raw, 2e-4);
    let b = write_trajectory(dir.path(), "uniform", &uniform, 2e-4);
    let c = write_trajectory(dir.path(), "other", &other, 2e-4);

    let same = elnet(&["equivalence", s(&a), s(&a)]);
    assert_eq!(code(&same), 0);
    assert!(stdout(&same).contains("deviation 0e0"), "{}", stdout(&same));
    let repar = elnet(&["equivalence", s(&a), s(&b)]);
    assert_eq!(code(&repar), 0, "{}", stdout(&repar));
    let differ = elnet(&["equivalence", s(&a), s(&c)]);
    assert_eq!(code(&differ), 1, "{}", stdout(&differ));
}
