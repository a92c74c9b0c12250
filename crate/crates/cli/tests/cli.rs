use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chainsmith(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainsmith"))
        .current_dir(dir)
        .env_remove("CHAINSMITH_WORKERS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = chainsmith(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn single_instance_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["gen", "--n", "8", "--alpha", "10", "--per-cell", "2", "--out", "corpus"],
    );
    let manifest = fs::read_to_string(d.join("corpus/manifest.json")).unwrap();
    assert!(manifest.contains("n8-a10-"));
    let cnf = "corpus/n8-a10-0000.cnf";

    let count: serde_json::Value = serde_json::from_str(&ok(d, &["count", cnf])).unwrap();
    assert!(count["count"].as_u64().unwrap() > 0);

    ok(d, &["reduce", cnf, "--out", "l.json", "--map", "map.json"]);
    ok(
        d,
        &[
            "hardware",
            "--rows",
            "4",
            "--cols",
            "4",
            "--dead-count",
            "3",
            "--out",
            "hw.json",
        ],
    );
    ok(d, &["embed", "l.json", "--hardware", "hw.json", "--out", "e.json"]);
    ok(
        d,
        &[
            "parametrize",
            "l.json",
            "--hardware",
            "hw.json",
            "--embedding",
            "e.json",
            "--strategy",
            "weighted-regularized",
            "--chain-coupling",
            "2.0",
            "--srt-index",
            "1",
            "--out",
            "p.json",
        ],
    );
    ok(
        d,
        &["sample", "p.json", "--reads", "40", "--sweeps", "100", "--out", "s.csv"],
    );
    assert!(d.join("s.provenance.json").exists());
    ok(
        d,
        &[
            "decode",
            "s.csv",
            "--logical",
            "l.json",
            "--hardware",
            "hw.json",
            "--embedding",
            "e.json",
            "--cnf",
            cnf,
            "--srt-index",
            "1",
            "--out",
            "dec.csv",
        ],
    );
    let decoded = fs::read_to_string(d.join("dec.csv")).unwrap();
    let mut lines = decoded.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance_id,read_index,decoder,bitstring,broken_chain_count,satisfied"
    );
    assert_eq!(lines.count(), 3 * 40);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "--seed",
            "7",
            "gen",
            "--n",
            "8",
            "--alpha",
            "10",
            "--per-cell",
            "2",
            "--out",
            "corpus",
        ],
    );
    let sweep = |out: &str, workers: &str| {
        ok(
            d,
            &[
                "--seed",
                "3",
                "--workers",
                workers,
                "sweep",
                "--corpus",
                "corpus",
                "--reads",
                "30",
                "--sweeps",
                "100",
                "--srt-count",
                "2",
                "--chain-couplings",
                "1.6,2.0",
                "--out",
                out,
            ],
        );
    };
    sweep("a", "1");
    sweep("b", "4");
    for f in ["results.csv", "report.json", "skipped.json"] {
        assert_eq!(
            fs::read(d.join("a").join(f)).unwrap(),
            fs::read(d.join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let rows = fs::read_to_string(d.join("a/results.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 4 * 2 * 2);

    ok(d, &["report", "a/results.csv", "--out", "again.json"]);
    assert_eq!(
        fs::read(d.join("again.json")).unwrap(),
        fs::read(d.join("a/report.json")).unwrap()
    );
}

#[test]
fn exact_backend_and_presets() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for preset in ["dw2-like", "dw2x-like"] {
        let hw: serde_json::Value = serde_json::from_str(&ok(d, &["hardware", "--preset", preset])).unwrap();
        assert!(hw.is_object());
    }
    fs::write(d.join("f.cnf"), "p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    ok(d, &["reduce", "f.cnf", "--out", "l.json"]);
    ok(d, &["hardware", "--rows", "2", "--cols", "2", "--out", "hw.json"]);
    ok(d, &["embed", "l.json", "--hardware", "hw.json", "--out", "e.json"]);
    ok(
        d,
        &[
            "parametrize",
            "l.json",
            "--hardware",
            "hw.json",
            "--embedding",
            "e.json",
            "--out",
            "p.json",
        ],
    );
    ok(
        d,
        &[
            "--backend",
            "exact",
            "sample",
            "p.json",
            "--reads",
            "12",
            "--out",
            "s.csv",
        ],
    );
    let text = fs::read_to_string(d.join("s.csv")).unwrap();
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 12);
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for args in [
        &["hardware", "--preset", "nope"][..],
        &["count", "missing.cnf"],
        &["--backend", "quantum", "sample", "missing.json"],
    ] {
        let out = chainsmith(d, args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}
