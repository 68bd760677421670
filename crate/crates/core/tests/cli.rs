use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn frontidx(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_frontidx"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    for k in ["FRONTIDX_GRID", "FRONTIDX_EPS_SING", "FRONTIDX_EPS_DOT", "FRONTIDX_EPS_DDOT", "FRONTIDX_EPS_RANK"] {
        if !env.iter().any(|(e, _)| *e == k) {
            cmd.env_remove(k);
        }
    }
    cmd.output().expect("spawn frontidx")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn sphere_front_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.cfg", "scenario=front_formula family=sphere grid=64\n");
    let out = tmp.path().join("out");
    let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["formulas"][0]["lhs"], 2);
    assert_eq!(r["formulas"][0]["residual"], 0);
}

#[test]
fn bad_config_exits_two_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.cfg", "scenario=front_formula\ngrid=lots\n");
    let o = frontidx(&["run", &cfg, "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 6"), "{err}");
}

#[test]
fn non_morin_parallel_front_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "p.cfg", "scenario=parallel_sweep family=sphere t=-1 grid=64\n");
    let out = tmp.path().join("out");
    let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    assert!(r["errors"].as_array().unwrap().iter().any(|e| e["kind"] == "NotMorin"), "{}", r["errors"]);
}

#[test]
fn reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "t.cfg", "scenario=morin_map family=torus_graph grid=64\n");
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("o{k}"));
        let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(0));
        let mut r = report(&out);
        r.as_object_mut().unwrap().remove("timing");
        reports.push(r);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn plots_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "b.cfg", "scenario=blaschke grid=64\n");
    let out = tmp.path().join("out");
    let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap(), "--plots"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for name in ["strata.svg", "xi_profile.svg", "gamma_profile.svg"] {
        let svg = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"), "{name}");
    }
}

#[test]
fn grid_env_override_applies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.cfg", "scenario=front_formula family=sphere grid=64\n");
    let out = tmp.path().join("out");
    let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap()], &[("FRONTIDX_GRID", "48")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["config"]["grid"], 48);
    let o = frontidx(&["run", &cfg, "--out", out.to_str().unwrap()], &[("FRONTIDX_GRID", "zero")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn several_configs_get_their_own_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(tmp.path(), "a.cfg", "scenario=poincare_hopf family=sphere_height\n");
    let b = write(tmp.path(), "b.cfg", "scenario=classify_patch\n");
    let out = tmp.path().join("out");
    let o = frontidx(&["run", &a, &b, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(report(&out.join("a"))["vector_field"]["sum"], 2);
    assert!(out.join("b/report.json").exists());
}
