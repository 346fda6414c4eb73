use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dpwai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpwai")).args(args).output().expect("binary runs")
}

fn sample(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name).to_string_lossy().into_owned()
}

fn path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_golden_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("golden");
    let o = dpwai(&["analyze", &sample("three_curves.dpw"), "--out", &path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let integral = fs::read_to_string(out.join("integral.txt")).unwrap();
    assert!(integral.contains("(x^4-y)^pi * (x^3+y) * (y^2+x)^r2"), "{integral}");
    assert!(integral.contains("DPWAI first integral"));
    for chain in ["P9", "P13", "P18"] {
        assert!(out.join("chains").join(format!("{chain}.dot")).exists());
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["dpwai"], true);
    assert_eq!(report["extended"]["delta"][1]["exact"], "6*r2+4*pi");
    assert!(fs::read_to_string(out.join("omega.dot")).unwrap().starts_with("graph \"omega\""));
}

#[test]
fn budget_flag_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let o = dpwai(&["analyze", &sample("three_curves.dpw"), "--out", &path(dir.path()), "--budget-points", "5"]);
    assert_eq!(o.status.code(), Some(23));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn prox_of_seventeen_sixths() {
    let o = dpwai(&["prox", "17/6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("digits [2;1,5]\n"), "{text}");
    assert!(text.contains("digraph"));
}

#[test]
fn prox_rejects_negative_ratio() {
    let o = dpwai(&["prox", "-3/2"]);
    assert_eq!(o.status.code(), Some(26));
}

#[test]
fn generate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    assert_eq!(dpwai(&["generate", "--seed", "1", "--out", &path(&gen)]).status.code(), Some(0));
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(gen.join("truth.json")).unwrap()).unwrap();
    let integral: Vec<String> = truth["curves"]
        .as_array()
        .unwrap()
        .iter()
        .zip(truth["alpha"].as_array().unwrap())
        .map(|(c, a)| format!("({})^({})", c.as_str().unwrap(), a["exact"].as_str().unwrap()))
        .collect();
    let system = path(&gen.join("system.dpw"));
    let o = dpwai(&["verify", &system, "--integral", &integral.join(" * ")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dpwai(&["verify", &system, "--integral", &integral[0]]);
    assert_eq!(o.status.code(), Some(11));
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let cases = [
        ("syntax.dpw", "system { dx = x +; dy = y; }", 20),
        ("undeclared.dpw", "system { dx = e*x; dy = y; }", 20),
        ("radial.dpw", "system { dx = x; dy = y; }", 24),
        ("common.dpw", "system { dx = x^2; dy = x*y; }", 26),
    ];
    for (name, text, code) in cases {
        let input = write(name, text);
        let o = dpwai(&["analyze", &path(&input), "--out", &path(&dir.path().join("out"))]);
        assert_eq!(o.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = dpwai(&["analyze", &path(&dir.path().join("missing.dpw"))]);
    assert_eq!(o.status.code(), Some(27));
}
