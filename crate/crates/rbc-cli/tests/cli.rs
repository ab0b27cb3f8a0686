use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The bundled default scenario on a coarse grid, with optional extra lines
/// appended to the `[solver]` table.
fn small_scenario(dir: &Path, solver: &str) -> String {
    let text = std::fs::read_to_string(repo("scenarios/paper-default.toml"))
        .unwrap()
        .replace("n = 512", "n = 64")
        .replace("tol = 1e-6\nmax_round_trips = 1000", solver);
    let path = dir.join("small.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn validate_echoes_the_bundled_scenario() {
    let o = rbc(&["validate", "--scenario", &repo("scenarios/paper-default.toml")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("wavelength      1064 nm"), "{out}");
    assert!(out.contains("r_M = 2.5 mm, r_L = 2.5 mm, r_G = 2.5 mm, l_c = 5 cm"), "{out}");
    assert!(out.trim_end().ends_with("ok"));
}

#[test]
fn validate_checks_a_sweep_against_the_scenario() {
    let o = rbc(&[
        "validate",
        "--scenario",
        &repo("scenarios/paper-default.toml"),
        "--sweep",
        &repo("sweeps/depth-direct.toml"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("sweep           d from 0 to 0.0025 (11 points), channel direct"));
}

#[test]
fn usage_and_parse_errors_exit_with_one() {
    assert_eq!(rbc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rbc(&["run"]).status.code(), Some(1));
    assert_eq!(rbc(&["sweep", "--scenario", "x.toml", "--out", "o"]).status.code(), Some(1));

    let missing = rbc(&["validate", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "wavelength = \"1064 nm\"\n").unwrap();
    let o = rbc(&["validate", "--scenario", &bad.display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("channel"), "{}", stderr(&o));
}

#[test]
fn help_exits_cleanly() {
    let o = rbc(&["--help"]);
    assert!(o.status.success());
    for sub in ["run", "sweep", "validate"] {
        assert!(stdout(&o).contains(sub));
    }
}

#[test]
fn run_prints_the_operating_point() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path(), "tol = 1e-6\nmax_round_trips = 1000");
    let out = dir.path().join("out");
    let o = rbc(&[
        "run",
        "--scenario",
        &scenario,
        "--channel",
        "direct",
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("eta_direct"));
    assert!(text.contains("status      ok"));
    let csv = std::fs::read_to_string(out.join("small.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn run_reports_non_convergence_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path(), "tol = 1e-300\nmax_round_trips = 10");
    let o = rbc(&["run", "--scenario", &scenario, "--channel", "direct"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path(), "tol = 1e-6\nmax_round_trips = 1000");
    let o = rbc(&["run", "--scenario", &scenario, "--grid-n", "100"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_tables_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path(), "tol = 1e-6\nmax_round_trips = 1000");
    let out = dir.path().join("figs");
    let run = |seed: &str| {
        rbc(&[
            "sweep",
            "--scenario",
            &scenario,
            "--sweep",
            &repo("sweeps/pump-direct.toml"),
            "--out",
            &out.display().to_string(),
            "--format",
            "both",
            "--seed",
            seed,
        ])
    };
    let o = run("7");
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("pump-direct.csv")).unwrap();
    assert_eq!(csv.lines().count(), 14);
    assert!(csv.starts_with("sweep_value,eta_direct,eta_irs,P_o,P_o_2v,"));
    for svg in ["pump-direct_P_o.svg", "pump-direct_P_o_2v.svg"] {
        let text = std::fs::read_to_string(out.join(svg)).unwrap();
        assert!(text.contains("<svg"));
    }
    assert!(run("7").status.success());
    assert_eq!(csv, std::fs::read_to_string(out.join("pump-direct.csv")).unwrap());
}

#[test]
fn sweep_outside_the_blocking_radius_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path(), "tol = 1e-6\nmax_round_trips = 1000");
    let sweep = dir.path().join("deep.toml");
    std::fs::write(
        &sweep,
        "variable = \"d\"\nstart = \"0 mm\"\nstop = \"3 mm\"\ncount = 4\nchannel = \"direct\"\n",
    )
    .unwrap();
    let o = rbc(&[
        "sweep",
        "--scenario",
        &scenario,
        "--sweep",
        &sweep.display().to_string(),
        "--out",
        &dir.path().join("o").display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("r_B"), "{}", stderr(&o));
}
