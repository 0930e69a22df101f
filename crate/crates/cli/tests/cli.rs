//! End-to-end runs of the binary: output shapes, exit codes, determinism.

use std::io::Write;
use std::process::{Command, Output};

fn write_map(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

fn berklim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_berklim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("berklim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn reduce_reports_and_exit_codes() {
    let dir = temp_dir();
    let square = write_map(&dir, "square.map", "num = [0,0,1]\nden = [1]\n");
    let out = berklim(&["reduce", "--map", &square]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("H = 1; phi = ζ^2"), "{text}");
    assert!(text.contains("good reduction"));

    // limit on a good-reduction family: hypothesis violated, exit 4
    let out = berklim(&["limit", "--map", &square]);
    assert_eq!(out.status.code(), Some(4));

    // unparseable family: exit 2
    let bad = write_map(&dir, "bad.map", "num = [0,0,1]\nwat = 1\n");
    let out = berklim(&["limit", "--map", &bad]);
    assert_eq!(out.status.code(), Some(2));

    // resultant-degenerate family: exit 3
    let degen = write_map(&dir, "degen.map", "num = [0,1]\nden = [0,1]\n");
    let out = berklim(&["reduce", "--map", &degen]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn limit_json_and_csv() {
    let dir = temp_dir();
    let map = write_map(&dir, "golden.map", "num = [0, 1*t^(-1), 1]\nden = [1]\n");
    let out = berklim(&["limit", "--map", &map, "--out", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "berklim/limit/v1");
    assert_eq!(v["leftover"], "0/1");
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 3);
    let masses: Vec<&str> = atoms.iter().map(|a| a["mass"].as_str().unwrap()).collect();
    assert!(masses.contains(&"1/2") && masses.contains(&"1/4"));
    let inf_atom = atoms.iter().find(|a| a["is_infinity"] == true).unwrap();
    assert_eq!(inf_atom["mass"], "1/2");

    let out = berklim(&["limit", "--map", &map, "--out", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("re,im,mass,is_infinity\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn outputs_are_byte_stable() {
    let dir = temp_dir();
    let map = write_map(&dir, "golden2.map", "num = [0, 1*t^(-1), 1]\nden = [1]\n");
    for cmd in ["reduce", "orbit", "degrees", "limit", "delta"] {
        let a = berklim(&[cmd, "--map", &map, "--out", "json"]);
        let b = berklim(&[cmd, "--map", &map, "--out", "json"]);
        assert!(a.status.success(), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd} output differs across runs");
    }
}

#[test]
fn delta_witness_flags_and_bound() {
    let dir = temp_dir();
    let map = write_map(&dir, "golden3.map", "num = [0, 1*t^(-1), 1]\nden = [1]\n");
    let out = berklim(&[
        "delta", "--map", &map, "--s", "1/2", "--s-prime", "1/4", "--n-max", "3", "--out",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["case"], "II");
    assert_eq!(v["nu"], "1/2");
    assert_eq!(v["witness"]["pullback_exact"], true);
    assert_eq!(v["witness"]["projection_exact"], true);

    // bound violation: exit 6
    let out = berklim(&[
        "delta", "--map", &map, "--s", "1/2", "--s-prime", "3/10", "--n-max", "3",
    ]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn verify_is_seed_deterministic() {
    let dir = temp_dir();
    let map = write_map(&dir, "golden4.map", "num = [0, 1*t^(-1), 1]\nden = [1]\n");
    let args = [
        "verify", "--map", &map, "--t", "1e-3", "--samples", "2000", "--burn-in", "16",
        "--seed", "11", "--out", "json",
    ];
    let a = berklim(&args);
    let b = berklim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["samples"], 2000);
    assert!(v["max_deviation"].as_f64().unwrap() < 0.1);
}

#[test]
fn study_emits_rows_per_t() {
    let dir = temp_dir();
    let map = write_map(
        &dir,
        "golden5.map",
        "num = [0, 1*t^(-1), 1]\nden = [1]\nsamples = 1000\nburn_in = 12\nseed = 5\n",
    );
    let out = berklim(&["study", "--map", &map, "--t", "0.01,0.001", "--out", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    // file options were honoured
    assert_eq!(v["samples"], 1000);
    assert_eq!(v["seed"], 5);
}

#[test]
fn file_options_yield_to_flags() {
    let dir = temp_dir();
    let map = write_map(
        &dir,
        "golden6.map",
        "num = [0, 1*t^(-1), 1]\nden = [1]\nseed = 5\nsamples = 1000\n",
    );
    let out = berklim(&[
        "verify", "--map", &map, "--t", "1e-3", "--seed", "77", "--samples", "500", "--burn-in",
        "8", "--out", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 77);
    assert_eq!(v["samples"], 500);
}
