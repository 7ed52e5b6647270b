use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stripscreen"));
    c.env_remove("STRIPSCREEN_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn stripscreen")
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

const SUBCOMMANDS: [&str; 11] = ["validate", "summarize", "analyze", "train", "eval", "ensemble", "triage", "sweep", "roc", "synth", "replay"];

#[test]
fn every_flag_is_documented() {
    for sub in SUBCOMMANDS {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help");
        let text = String::from_utf8(out.stdout).unwrap();
        for line in text.lines().skip_while(|l| !l.starts_with("Options:")).skip(1) {
            let t = line.trim();
            if !t.starts_with("--") {
                continue;
            }
            let flag = t.split_whitespace().next().unwrap();
            let rest = t.split_once("  ").map(|(_, r)| r.trim()).unwrap_or("");
            assert!(!rest.is_empty(), "{sub}: {flag} has no description");
        }
    }
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
}

#[test]
fn error_lines_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["eval", "--nope"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[usage]: ") && err.trim_end().lines().count() == 1, "{err}");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,center\nx,A\n").unwrap();
    assert_eq!(run(&["validate", "--input", &s(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--input", &s(&dir.path().join("missing.csv"))]).status.code(), Some(1));

    // a single-class training set cannot be fitted
    let d = dir.path().join("d.csv");
    assert!(run(&["synth", "--preset", "null", "--n", "60", "--out", &s(&d)]).status.success());
    let text = std::fs::read_to_string(&d).unwrap();
    let mut one_class = String::new();
    for (i, line) in text.lines().enumerate() {
        let mut cols: Vec<&str> = line.split(',').collect();
        if i > 0 {
            cols[7] = "0";
        }
        one_class.push_str(&cols.join(","));
        one_class.push('\n');
    }
    let neg = dir.path().join("neg.csv");
    std::fs::write(&neg, one_class).unwrap();
    let out = run(&["train", "--input", &s(&neg), "--out", &s(&dir.path().join("m")), "--space", "rgb", "--family", "logreg"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn strict_mode_rejects_what_lenient_mode_drops() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.csv");
    assert!(run(&["synth", "--preset", "null", "--n", "30", "--out", &s(&d)]).status.success());
    let text = std::fs::read_to_string(&d).unwrap().replacen(",M,", ",X,", 1);
    std::fs::write(&d, text).unwrap();
    let lenient = run(&["validate", "--input", &s(&d)]);
    assert!(lenient.status.success());
    assert!(String::from_utf8(lenient.stdout).unwrap().contains("29 samples"));
    assert_eq!(run(&["validate", "--input", &s(&d), "--strict"]).status.code(), Some(2));
}

#[test]
fn env_seed_is_a_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| s(&dir.path().join(n));
    let cfg = format!("{}/configs/null.cfg", env!("CARGO_MANIFEST_DIR"));
    assert!(run(&["synth", "--config", &cfg, "--n", "50", "--seed", "77", "--out", &p("flag.csv")]).status.success());
    let env = bin().args(["synth", "--config", &cfg, "--n", "50", "--out", &p("env.csv")]).env("STRIPSCREEN_SEED", "77").output().unwrap();
    assert!(env.status.success());
    let both = bin()
        .args(["synth", "--config", &cfg, "--n", "50", "--seed", "77", "--out", &p("both.csv")])
        .env("STRIPSCREEN_SEED", "5")
        .output()
        .unwrap();
    assert!(both.status.success());
    assert!(run(&["synth", "--config", &cfg, "--n", "50", "--out", &p("cfg.csv")]).status.success());
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("flag.csv"), read("env.csv"));
    assert_eq!(read("flag.csv"), read("both.csv"));
    assert_ne!(read("flag.csv"), read("cfg.csv"));
    let bad = bin().args(["validate", "--input", &p("cfg.csv")]).env("STRIPSCREEN_SEED", "abc").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn synth_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{}/configs/null.cfg", env!("CARGO_MANIFEST_DIR"));
    for name in ["a.csv", "b.csv"] {
        assert!(run(&["synth", "--config", &cfg, "--out", &s(&dir.path().join(name))]).status.success());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1001);
}

#[test]
fn replay_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| s(&dir.path().join(n));
    assert!(run(&["synth", "--preset", "separable", "--n", "200", "--out", &p("d.csv")]).status.success());
    assert!(run(&["analyze", "--input", &p("d.csv"), "--out", &p("an")]).status.success());
    let manifest = p("an/manifest.json");
    assert!(run(&["replay", "--manifest", &manifest, "--out", &p("again")]).status.success());
    assert_eq!(std::fs::read(p("an/pvalues.svg")).unwrap(), std::fs::read(p("again/pvalues.svg")).unwrap());

    let m = std::fs::read_to_string(&manifest).unwrap();
    let first = m.find("\"sha256\"").unwrap();
    let second = m[first + 1..].find("\"sha256\"").unwrap() + first + 1;
    let tampered = format!("{}\"sha256\": \"00{}", &m[..second], &m[second + 12..]);
    std::fs::write(&manifest, tampered).unwrap();
    assert_eq!(run(&["replay", "--manifest", &manifest]).status.code(), Some(3));

    std::fs::write(&manifest, &m).unwrap();
    let mut data = std::fs::read(p("d.csv")).unwrap();
    data.extend_from_slice(b"\n");
    std::fs::write(p("d.csv"), data).unwrap();
    assert_eq!(run(&["replay", "--manifest", &manifest]).status.code(), Some(2));
}

#[test]
fn manifest_records_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| s(&dir.path().join(n));
    assert!(run(&["synth", "--preset", "separable", "--n", "200", "--out", &p("d.csv")]).status.success());
    assert!(run(&["ensemble", "--input", &p("d.csv"), "--out", &p("e"), "--family", "logreg", "--seed", "4", "--workers", "2"]).status.success());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p("e/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "ensemble");
    assert_eq!(m["seed"], 4);
    assert_eq!(m["config"]["family"], "logreg");
    assert_eq!(m["inputs"][0]["path"], p("d.csv"));
    let outs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(outs, ["ensemble.model", "train_metrics.csv"]);
    let args: Vec<&str> = m["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
    assert!(!args.contains(&"--workers") && !args.contains(&"--out"));
}
