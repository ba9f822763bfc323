use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn monogen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogen"))
        .args(args)
        .current_dir(dir)
        .env_remove("MONOGEN_OUT_DIR")
        .output()
        .expect("spawn monogen")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn topo_zeros_on_z_cubed() {
    let dir = tempfile::tempdir().unwrap();
    let out = monogen(dir.path(), &["topo-zeros", "--field", "z_pow_3", "--circle", "0,0,1,256", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("o/topo-zeros.report.json"));
    assert_eq!(r["results"]["zeros"], 3);
    assert_eq!(r["results"]["winding"], 3);
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["field"], "z_pow_3");
    assert!(r["version"].is_string());
    assert!(r["wall_clock_seconds"].is_number());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fail = monogen(dir.path(), &["topo-winding", "--field", "z_pow_3", "--expect", "2", "--out", "o"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL winding number"));
    for bad in [
        &["topo-winding", "--field", "nope"][..],
        &["no-such-command"][..],
        &["grid-analyze", "--input", "missing.json"][..],
        &["topo-zeros", "--field", "z_pow_1", "--circle", "0,0,1"][..],
        &["topo-betti", "--config", "missing.toml"][..],
    ] {
        let out = monogen(dir.path(), bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(monogen(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "command = \"topo-zeros\"\nfield = \"z_pow_2\"\nout_dir = \"from-config\"\n")
        .unwrap();
    let out = monogen(dir.path(), &["topo-zeros", "--config", "c.toml", "--field", "z_pow_4", "--hbar", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&dir.path().join("from-config/topo-zeros.report.json"));
    assert_eq!(r["results"]["zeros"], 2);
    assert_eq!(r["config"]["field"], "z_pow_2");
    assert_eq!(r["config"]["hbar"], 0.5);
    assert_eq!(r["config"]["circle"], "0,0,1,256");

    std::fs::write(dir.path().join("wrong.toml"), "command = \"topo-betti\"\n").unwrap();
    assert_eq!(monogen(dir.path(), &["topo-zeros", "--config", "wrong.toml"]).status.code(), Some(2));
    std::fs::write(dir.path().join("typo.toml"), "feild = \"z_pow_2\"\n").unwrap();
    assert_eq!(monogen(dir.path(), &["topo-zeros", "--config", "typo.toml"]).status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_monogen"))
        .args(["topo-winding", "--field", "two_root"])
        .current_dir(dir.path())
        .env("MONOGEN_OUT_DIR", "env-out")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("env-out/topo-winding.report.json").exists());
    let flag = monogen(dir.path(), &["topo-winding", "--field", "two_root"]);
    assert_eq!(flag.status.code(), Some(0));
    assert!(dir.path().join("monogen-out/topo-winding.report.json").exists());
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = monogen(dir.path(), &["heat-flow", "--steps", "200", "--format", "csv", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let energy = std::fs::read_to_string(dir.path().join("o/heat-flow.energy.csv")).unwrap();
    let mut lines = energy.lines();
    assert_eq!(lines.next(), Some("t,energy"));
    assert_eq!(lines.count(), 201);
    let checks = std::fs::read_to_string(dir.path().join("o/heat-flow.checks.csv")).unwrap();
    assert!(checks.starts_with("name,expected,computed,tolerance,passed"));
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = walk(dir)
        .into_iter()
        .filter(|p| !p.to_string_lossy().ends_with(".report.json") && !p.to_string_lossy().contains(".checks."))
        .map(|p| (p.strip_prefix(dir).unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn identical_runs_give_identical_data() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["bohm-evolve", "--steps", "40", "--save-every", "10"],
        &["bohm-trajectories", "--steps", "40", "--seeds=-1,1"],
        &["heat-flow", "--field", "smooth_random seed=3", "--steps", "50"],
        &["grid-analyze", "--field", "z_pow_3", "--n", "17"],
        &["ga-eval", "--axioms", "20", "--seed", "9"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        for out in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", out]);
            assert_eq!(monogen(dir.path(), &full).status.code(), Some(0), "{full:?}");
        }
        let (fa, fb) = (data_files(&dir.path().join(&a)), data_files(&dir.path().join(&b)));
        assert!(!fa.is_empty() || args[0] == "ga-eval");
        assert_eq!(fa, fb, "{args:?}");
        let strip = |p: &Path| {
            let mut r = report(p);
            r["wall_clock_seconds"] = Value::Null;
            r["outputs"] = Value::Null;
            r["config"]["out_dir"] = Value::Null;
            r
        };
        let name = format!("{}.report.json", args[0]);
        assert_eq!(strip(&dir.path().join(&a).join(&name)), strip(&dir.path().join(&b).join(&name)));
    }
}

#[test]
fn evolve_then_diagnose_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let ev = monogen(dir.path(), &["bohm-evolve", "--steps", "60", "--save-every", "3", "--out", "run"]);
    assert_eq!(ev.status.code(), Some(0));
    let manifest = dir.path().join("run/series/manifest.json");
    assert_eq!(report(&manifest)["frames"].as_array().unwrap().len(), 21);
    let dg = monogen(dir.path(), &["bohm-diagnose", "--manifest", "run/series/manifest.json", "--out", "diag"]);
    assert_eq!(dg.status.code(), Some(0), "{}", String::from_utf8_lossy(&dg.stderr));
    assert_eq!(report(&dir.path().join("diag/bohm-diagnose.report.json"))["results"]["frames"], 19);
    let tr = monogen(dir.path(), &["bohm-trajectories", "--manifest", "run/series/manifest.json", "--seeds=-0.5,0.5", "--out", "tr"]);
    assert_eq!(tr.status.code(), Some(0));
    let paths = report(&dir.path().join("tr/bohm-trajectories.paths.json"));
    assert_eq!(paths.as_array().unwrap().len(), 2);
}

#[test]
fn grid_field_file_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let a = monogen(dir.path(), &["grid-analyze", "--field", "z_pow_2", "--n", "33", "--out", "a"]);
    assert_eq!(a.status.code(), Some(0));
    // feed the Dirac output back in: D(z^2) is zero up to roundoff in the interior
    let b = monogen(dir.path(), &["grid-analyze", "--input", "a/grid-analyze.dirac.json", "--expect", "0", "--out", "b"]);
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stdout));
}

#[test]
fn symbolic_suite_and_expression() {
    let dir = tempfile::tempdir().unwrap();
    let s = monogen(dir.path(), &["sym-verify", "--suite", "paper-section-2", "--out", "o"]);
    assert_eq!(s.status.code(), Some(0));
    let e = monogen(
        dir.path(),
        &["sym-verify", "--expr", "f*e1^e2", "--signature", "2,0", "--deps", "f:1,2", "--expect", "-d_2(f) e1 + d_1(f) e2", "--out", "o"],
    );
    let stdout = String::from_utf8_lossy(&e.stdout);
    assert!(stdout.contains("dirac"), "{stdout}");
    assert_eq!(e.status.code(), Some(0), "{}", String::from_utf8_lossy(&e.stderr));
    assert_eq!(monogen(dir.path(), &["sym-verify", "--suite", "other"]).status.code(), Some(2));
}

#[test]
fn paper_suite_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = monogen(dir.path(), &["paper-suite", "--criteria", "1,6,9", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS] criterion")).count(), 3);
}
