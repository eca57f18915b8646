use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edagger")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn complex(v: &serde_json::Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn exit_code_contract() {
    assert_eq!(run(&["periods", "--curve", "4/0"]).status.code(), Some(0));
    assert_eq!(run(&["periods", "--curve", "3/1"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--curve", "1/2,x"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--curve", "4/0", "--tol", "1e-2"]).status.code(), Some(2));
    assert_eq!(run(&["wfun", "--curve", "4/0", "--z", "0,0"]).status.code(), Some(1));
    assert_eq!(run(&["integrate", "--model", "p1", "--word", "0", "--circle", "1,0,1e-20"]).status.code(), Some(1));
    assert_eq!(run(&["bar", "--model", "edagger", "--N", "60", "--ell", "3"]).status.code(), Some(1));
    assert_eq!(run(&["mzv", "--index", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn periods_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = run(&["periods", "--curve", "4/0", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out);
    let (re, im) = complex(&v["lattice"]["tau"]);
    assert!(re.abs() < 1e-9 && (im - 1.0).abs() < 1e-9);
    assert!(v["legendre_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["curve"]["a"], "4");
}

#[test]
fn lattice_loop_integrals() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, wp, np) = (dir.path().join("p.json"), dir.path().join("w.json"), dir.path().join("n.json"));
    run(&["periods", "--curve", "5/2", "--json", pp.to_str().unwrap()]);
    let lat = json(&pp)["lattice"].clone();
    let o = run(&["integrate", "--curve", "5/2", "--word", "w0", "--loop", "1,0", "--json", wp.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    run(&["integrate", "--curve", "5/2", "--word", "nu", "--loop", "1,0", "--json", np.to_str().unwrap()]);
    let (w1, eta1) = (complex(&lat["omega1"]), complex(&lat["eta1"]));
    let (a, b) = (complex(&json(&wp)["value"]), complex(&json(&np)["value"]));
    assert!((a.0 - w1.0).abs() < 1e-8 && (a.1 - w1.1).abs() < 1e-8);
    assert!((b.0 + eta1.0).abs() < 1e-8 && (b.1 + eta1.1).abs() < 1e-8);
}

#[test]
fn path_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.json");
    std::fs::write(
        &path,
        r#"{"model": "p1", "segments": [{"kind": "arc", "center": [0, 0], "radius": 0.4, "angles": [0, 6.283185307179586]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("o.json");
    let o = run(&["integrate", "--word", "0", "--path", path.to_str().unwrap(), "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (re, im) = complex(&json(&out)["value"]);
    assert!(re.abs() < 1e-12 && (im - 2.0 * std::f64::consts::PI).abs() < 1e-12);

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"curve": {"a": "1/2", "b": "-3"}, "tol": 1e-11}"#).unwrap();
    assert_eq!(run(&["periods", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    std::fs::write(&cfg, r#"{"curve": {"a": "1", "b": "2"}, "tolerance": 1e-11}"#).unwrap();
    assert_eq!(run(&["periods", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"curve": {"a": "1", "b": "2"}, "tol": 1e-16}"#).unwrap();
    assert_eq!(run(&["periods", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bar_listing() {
    let o = run(&["bar", "--model", "p1", "--ell", "4"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("kernel dimension") && l.ends_with(" 31")), "{text}");
    let o = run(&["bar", "--model", "edagger", "--N", "4", "--ell", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.trim() == "-[w1] + [nu|w0]"), "{text}");
}

#[test]
fn mzv_and_flatness() {
    let o = run(&["mzv", "--index", "2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("+1.2020569031"), "{text}");
    assert_eq!(run(&["kzb-flatness", "--N", "5", "--ell", "4"]).status.code(), Some(0));
}

#[test]
fn identical_runs_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["verify", "--select", "1,5,7,11", "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn verify_selections() {
    let o = run(&["verify", "--select", "negative-controls"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("[PASS] criterion  9"));
    let o = run(&["verify", "--select", "11", "--tol", "1e-15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().contains("quadrature failure"));
}
