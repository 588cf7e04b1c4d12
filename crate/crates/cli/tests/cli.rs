use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gatemdp"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/compile_targets.txt")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes)
        .unwrap_or_else(|e| panic!("not json ({e}): {}", String::from_utf8_lossy(bytes)))
}

#[test]
fn brute_force_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture();
    let mut texts = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let status = run(&[
            "brute-force",
            "--target-file",
            fixture.to_str().unwrap(),
            "--eps",
            "0.3",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        texts.push(std::fs::read_to_string(&out).unwrap().replace(name, ""));
    }
    assert_eq!(texts[0], texts[1]);
    let report = json(texts[0].as_bytes());
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["config"]["eps"], 0.3);
    let entries = report["result"].as_array().unwrap();
    assert_eq!(entries.len(), 29);
    assert_eq!(entries[0]["brute_force"]["sequence"], "THTTH");
    assert_eq!(entries[15]["brute_force"]["length"], 2);
    assert!(entries[0].get("mdp").is_none());
}

#[test]
fn usage_errors_are_machine_readable() {
    let out = run(&["state-prep", "--k", "16"]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out.stderr);
    assert_eq!(err["error"]["kind"], "usage");
    assert!(err["error"]["message"].as_str().unwrap().contains("seed"));

    let out = run(&["compile", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"]["kind"], "usage");

    let out = run(&["brute-force", "--target-file", "/nonexistent/targets.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["error"]["kind"], "io");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "kind = brute-force\neps = 0.01\nmax_n = 3\ntarget_file = {}\n",
            fixture().display()
        ),
    )
    .unwrap();
    let out = run(&[
        "brute-force",
        "--config",
        conf.to_str().unwrap(),
        "--eps",
        "0.3",
        "--max-n",
        "12",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out.stdout);
    assert_eq!(report["config"]["eps"], 0.3);
    assert_eq!(report["result"][1]["brute_force"]["sequence"], "HTHT");

    let out = run(&["compile", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn landscape_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ihst.csv");
    let args = [
        "landscape",
        "--gateset",
        "ihst",
        "--gamma",
        "0.95",
        "--k",
        "16",
        "--seed",
        "7",
        "--samples",
        "200000",
    ];
    let status = bin()
        .args(args)
        .args(["--output", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "cell_kind,n_band,m_band,theta_center,phi_center,value,best_action,program_length"
    );
    assert_eq!(lines.count(), 2 + 14 * 32);
    let report = json(&std::fs::read(out.with_extension("json")).unwrap());
    assert_eq!(report["seed"], 7);
    let south = report["result"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["cell_kind"] == "south_cap")
        .unwrap();
    assert!((south["value"].as_f64().unwrap() - 20.0).abs() < 1e-6);
}

#[test]
fn ht_states_reach_high_fidelity() {
    let out = run(&[
        "ht-states",
        "--n",
        "100,1000,10000",
        "--k",
        "16",
        "--seed",
        "7",
        "--samples",
        "200000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out.stdout);
    let entries = report["result"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        assert!(e["fidelity"].as_f64().unwrap() >= 0.98, "{e}");
    }
}

#[test]
fn compile_results_do_not_depend_on_threads() {
    let base = [
        "compile",
        "--targets",
        "2",
        "--seed",
        "11",
        "--rollouts",
        "300",
    ];
    let a = bin().args(base).args(["--threads", "1"]).output().unwrap();
    let b = bin()
        .args(base)
        .args(["--exec", "sequential"])
        .output()
        .unwrap();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let (a, b) = (json(&a.stdout), json(&b.stdout));
    assert_eq!(a["result"], b["result"]);
    for e in a["result"].as_array().unwrap() {
        assert!(e["brute_force"]["distance"].as_f64().unwrap() < 0.3);
        let mdp = &e["mdp"];
        assert!(
            mdp.get("error").is_some()
                || mdp["length"].as_u64().unwrap() >= e["brute_force"]["length"].as_u64().unwrap()
        );
    }
}
