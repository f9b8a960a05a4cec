//! Black-box tests of the `qldpc` binary plus format round-trip properties.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

use qldpc_cli::formats::{from_alist, from_coordinates, to_alist, to_coordinates};
use qldpc_core::gf2::SparseBitMatrix;

fn qldpc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qldpc"))
}

fn output_of(cmd: &mut Command) -> Output {
    cmd.output().expect("binary should run")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn build_toric2(dir: &Path) {
    let out = output_of(
        qldpc()
            .args(["build-code", "--family", "toric3d", "-L", "2", "--periodic", "-o"])
            .arg(dir),
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
}

fn records_of(stdout: &str) -> Vec<Value> {
    stdout
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("record line parses"))
        .collect()
}

fn without_seconds(mut records: Vec<Value>) -> Vec<Value> {
    for record in &mut records {
        record.as_object_mut().unwrap().insert("seconds".into(), Value::from(0));
    }
    records
}

#[test]
fn build_code_emits_five_files_and_a_manifest_deterministically() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    build_toric2(&a);
    build_toric2(&b);

    let names = ["hx.alist", "hz.alist", "meta.alist", "lx.alist", "lz.alist", "manifest.json"];
    for name in names {
        let first = fs::read(a.join(name)).unwrap();
        let second = fs::read(b.join(name)).unwrap();
        assert!(!first.is_empty(), "{name} should not be empty");
        assert_eq!(first, second, "{name} should be byte-identical across builds");
    }

    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["family"], "toric3d");
    assert_eq!(manifest["L"], 2);
    assert_eq!(manifest["n"], 24);
    assert_eq!(manifest["k"], 3);
    assert_eq!(manifest["periodic"], true);

    let hx = from_alist(&fs::read_to_string(a.join("hx.alist")).unwrap()).unwrap();
    let hz = from_alist(&fs::read_to_string(a.join("hz.alist")).unwrap()).unwrap();
    assert_eq!(hx.cols(), 24);
    assert_eq!(hz.cols(), 24);
    assert!(hx.mul_is_zero(&hz.transpose()), "reloaded matrices stay CSS-orthogonal");
}

#[test]
fn build_code_rejects_unknown_family_with_exit_1() {
    let tmp = TempDir::new().unwrap();
    let out = output_of(
        qldpc()
            .args(["build-code", "--family", "toric2d", "-L", "3", "-o"])
            .arg(tmp.path()),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("family"), "{}", stderr_of(&out));
}

fn write_ring4(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("ring4.txt");
    fs::write(&path, "4 4\n0 0\n0 1\n1 1\n1 2\n2 2\n2 3\n3 3\n3 0\n").unwrap();
    path
}

#[test]
fn decode_finds_the_single_flip_on_a_ring() {
    let tmp = TempDir::new().unwrap();
    let pcm = write_ring4(tmp.path());
    let syn = tmp.path().join("syn.txt");
    fs::write(&syn, "1\n1\n0\n0\n").unwrap();

    for algorithm in ["msa", "atd"] {
        let out = output_of(
            qldpc()
                .arg("decode")
                .arg("--pcm")
                .arg(&pcm)
                .arg("--syndrome")
                .arg(&syn)
                .args(["--algorithm", algorithm, "--prior-p", "0.05", "--osd", "cs"]),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        let report: Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
        assert_eq!(report["algorithm"], algorithm);
        assert_eq!(report["satisfied"], true);
        assert_eq!(report["estimate"], serde_json::json!([0, 1, 0, 0]), "{algorithm}");
    }
}

#[test]
fn decode_exits_2_when_the_syndrome_cannot_be_matched() {
    let tmp = TempDir::new().unwrap();
    let pcm = write_ring4(tmp.path());
    let syn = tmp.path().join("odd.txt");
    fs::write(&syn, "1\n0\n0\n0\n").unwrap();

    let out = output_of(
        qldpc()
            .arg("decode")
            .arg("--pcm")
            .arg(&pcm)
            .arg("--syndrome")
            .arg(&syn)
            .args(["--algorithm", "msa", "--osd", "none"]),
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let report: Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(report["satisfied"], false);
}

#[test]
fn decode_ssmsa_without_sigma_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let pcm = write_ring4(tmp.path());
    let syn = tmp.path().join("syn.txt");
    fs::write(&syn, "1\n1\n0\n0\n").unwrap();

    let out = output_of(
        qldpc()
            .arg("decode")
            .arg("--pcm")
            .arg(&pcm)
            .arg("--syndrome")
            .arg(&syn)
            .args(["--algorithm", "ssmsa"]),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("sigma"), "{}", stderr_of(&out));
}

fn capacity_scenario(code: &str, seed: u64) -> String {
    format!(
        r#"{{
  "code": "{code}",
  "noise": {{ "p": [0.02, 0.04] }},
  "protocol": "capacity",
  "decoder": {{ "osd": "cs" }},
  "seed": {seed},
  "max_samples": 240,
  "batch": 60,
  "precision_cut": 0
}}"#
    )
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let code_dir = tmp.path().join("code");
    build_toric2(&code_dir);
    let scenario = tmp.path().join("scenario.json");
    fs::write(&scenario, capacity_scenario("code/manifest.json", 7)).unwrap();

    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let out = output_of(
            qldpc().arg("simulate").arg(&scenario).args(["--threads", threads]),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        runs.push(without_seconds(records_of(&stdout_of(&out))));
    }
    assert_eq!(runs[0].len(), 2, "one record per sweep point");
    assert_eq!(runs[0], runs[1], "thread count must not change results");

    let sigma = runs[0][0]["sigma"].as_f64().unwrap();
    assert!(sigma > 0.0, "sigma should be derived from p");
    assert_eq!(runs[0][0]["samples"], 240);
    assert_eq!(
        runs[0][0]["config_hash"], runs[0][1]["config_hash"],
        "all records of a run share the resolved config hash"
    );
}

#[test]
fn simulate_csv_mirrors_the_json_records() {
    let tmp = TempDir::new().unwrap();
    let code_dir = tmp.path().join("code");
    build_toric2(&code_dir);
    let scenario = tmp.path().join("scenario.json");
    fs::write(&scenario, capacity_scenario("code/manifest.json", 3)).unwrap();
    let csv_path = tmp.path().join("records.csv");

    let out = output_of(qldpc().arg("simulate").arg(&scenario).arg("--csv").arg(&csv_path));
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let records = records_of(&stdout_of(&out));

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("p,sigma,L,rounds,w,n,k,fails_x,fails_z,p_l,wer,err,seconds"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), records.len());
    for (row, record) in rows.iter().zip(&records) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<f64>().unwrap(), record["p"].as_f64().unwrap());
        assert_eq!(fields[7].parse::<u64>().unwrap(), record["fails_x"].as_u64().unwrap());
    }
}

#[test]
fn malformed_scenarios_exit_1_with_the_offending_field() {
    let tmp = TempDir::new().unwrap();
    let scenario = tmp.path().join("bad.json");

    fs::write(
        &scenario,
        r#"{ "code": "x.json", "noise": { "p": [0.1] }, "protocol": "quantum",
             "seed": 1, "max_samples": 10 }"#,
    )
    .unwrap();
    let out = output_of(qldpc().arg("simulate").arg(&scenario));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("protocol"), "{}", stderr_of(&out));

    fs::write(
        &scenario,
        r#"{ "code": "x.json", "noise": { "p": [0.1] }, "protocol": "capacity",
             "rounds": 4, "seed": 1, "max_samples": 10 }"#,
    )
    .unwrap();
    let out = output_of(qldpc().arg("simulate").arg(&scenario));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("rounds:"), "{}", stderr_of(&out));
}

#[test]
fn qldpc_seed_env_overrides_the_scenario_seed() {
    let tmp = TempDir::new().unwrap();
    let code_dir = tmp.path().join("code");
    build_toric2(&code_dir);
    let scenario = tmp.path().join("scenario.json");
    fs::write(&scenario, capacity_scenario("code/manifest.json", 7)).unwrap();

    let overridden = output_of(
        qldpc().arg("simulate").arg(&scenario).env("QLDPC_SEED", "99"),
    );
    assert_eq!(overridden.status.code(), Some(0), "{}", stderr_of(&overridden));
    let overridden = records_of(&stdout_of(&overridden));
    assert!(overridden.iter().all(|r| r["seed"] == 99));

    let scenario99 = tmp.path().join("scenario99.json");
    fs::write(&scenario99, capacity_scenario("code/manifest.json", 99)).unwrap();
    let native = output_of(qldpc().arg("simulate").arg(&scenario99));
    assert_eq!(native.status.code(), Some(0), "{}", stderr_of(&native));
    let native = records_of(&stdout_of(&native));

    assert_eq!(without_seconds(overridden), without_seconds(native));
}

#[test]
fn simulate_reports_residual_violations_in_the_record() {
    let tmp = TempDir::new().unwrap();
    let code_dir = tmp.path().join("code");
    build_toric2(&code_dir);
    let scenario = tmp.path().join("scenario.json");
    fs::write(
        &scenario,
        r#"{
  "code": "code/manifest.json",
  "noise": { "p": [0.06], "sigma": [1.0] },
  "protocol": "single_shot",
  "rounds": 3,
  "decoder": { "osd": "none", "max_iter": 30 },
  "seed": 5,
  "max_samples": 60,
  "batch": 30,
  "precision_cut": 0
}"#,
    )
    .unwrap();

    let out = output_of(qldpc().arg("simulate").arg(&scenario));
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let records = records_of(&stdout_of(&out));
    assert_eq!(records.len(), 1);
    assert!(records[0]["violations"].as_u64().unwrap() > 0);
}

fn synthetic_records(p_th: f64, mu: f64, rounds: Option<usize>) -> String {
    let quadratic = [0.15, 1.8, 5.0];
    let mut lines = String::new();
    for &size in &[4usize, 6, 8] {
        for step in -5i32..=5 {
            let p = p_th * (1.0 + 0.05 * f64::from(step));
            let x = (p - p_th) * (size as f64).powf(1.0 / mu);
            let rate = quadratic[0] + quadratic[1] * x + quadratic[2] * x * x;
            let record = serde_json::json!({
                "p": p,
                "sigma": 0.3,
                "L": size,
                "rounds": rounds,
                "n": 3 * size * size * size,
                "k": 3,
                "fails_x": 0,
                "fails_z": 0,
                "p_l": rate,
                "wer": rate,
                "err": 0.004,
                "seconds": 0.0,
                "samples": 10_000,
                "failures": 0,
                "violations": 0,
                "wer_err": 0.004,
                "family": "toric3d",
                "protocol": "single_shot",
                "seed": 1,
                "config_hash": "synthetic"
            });
            lines.push_str(&record.to_string());
            lines.push('\n');
        }
    }
    lines
}

#[test]
fn fit_threshold_recovers_a_synthetic_crossing() {
    let tmp = TempDir::new().unwrap();
    let records = tmp.path().join("records.jsonl");
    fs::write(&records, synthetic_records(0.032, 1.4, None)).unwrap();

    let out = output_of(qldpc().arg("fit-threshold").arg(&records));
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let fit: Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let p_th = fit["p_th"].as_f64().unwrap();
    let mu = fit["mu"].as_f64().unwrap();
    assert!((p_th - 0.032).abs() < 2e-3, "p_th={p_th}");
    assert!((mu - 1.4).abs() < 0.2, "mu={mu}");
}

#[test]
fn fit_threshold_plateau_extrapolates_over_rounds() {
    let tmp = TempDir::new().unwrap();
    let records = tmp.path().join("records.jsonl");
    let sustainable = 0.03;
    let slope = 0.02;
    let mut text = String::new();
    for rounds in [1usize, 2, 4, 8] {
        let p_th = sustainable + slope * 0.5f64.powi(rounds as i32);
        text.push_str(&synthetic_records(p_th, 1.2, Some(rounds)));
    }
    fs::write(&records, text).unwrap();

    let out = output_of(qldpc().arg("fit-threshold").arg(&records).arg("--plateau"));
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let fit: Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(fit["fits"].as_array().unwrap().len(), 4);
    let recovered = fit["sustainable"].as_f64().unwrap();
    assert!((recovered - sustainable).abs() < 2e-3, "sustainable={recovered}");
}

fn matrix_strategy() -> impl Strategy<Value = SparseBitMatrix> {
    (0usize..6, 1usize..10).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(
            proptest::collection::vec(0..cols as u32, 0..cols),
            rows..=rows,
        )
        .prop_map(move |supports| SparseBitMatrix::from_rows(supports, cols).unwrap())
    })
}

proptest! {
    #[test]
    fn alist_round_trips_any_sparse_matrix(m in matrix_strategy()) {
        let text = to_alist(&m);
        let back = from_alist(&text).unwrap();
        prop_assert_eq!(back.to_dense_rows(), m.to_dense_rows());
        prop_assert_eq!(to_alist(&back), text);
    }

    #[test]
    fn coordinates_round_trip_any_sparse_matrix(m in matrix_strategy()) {
        let text = to_coordinates(&m);
        let back = from_coordinates(&text).unwrap();
        prop_assert_eq!(back.to_dense_rows(), m.to_dense_rows());
        prop_assert_eq!(to_coordinates(&back), text);
    }
}
