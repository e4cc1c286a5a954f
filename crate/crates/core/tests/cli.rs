use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_arwmass");

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(config: &Path, out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.arg(config).arg("--output-dir").arg(out);
    if let Some(t) = threads {
        cmd.env("ARWMASS_THREADS", t);
    }
    cmd.output().unwrap()
}

fn run_json(json: &str) -> (tempfile::TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, json).unwrap();
    let out = run_config(&config, dir.path(), None);
    (dir, out)
}

struct Csv {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = fs::read_to_string(path).unwrap();
        let (comments, rest): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
        let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
        Csv {
            comments: comments.into_iter().map(str::to_string).collect(),
            header: split(rest[0]),
            rows: rest[1..].iter().map(|l| split(l)).collect(),
        }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

#[test]
fn sads_demo_m_hat_ends_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs_dir().join("sads-demo.json"), dir.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = Csv::read(&dir.path().join("sads-demo.csv"));
    let m = csv.column("m_hat");
    assert!((m.last().unwrap() - 1.0).abs() <= 1e-5);
    for (a, b) in csv.column("integral").iter().zip(csv.column("oracle_integral")) {
        assert!((a - b).abs() <= 1e-9 * b);
    }
}

#[test]
fn rw_family_k2_mass_is_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs_dir().join("rw-mass.json"), dir.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = Csv::read(&dir.path().join("mass.csv"));
    assert!((csv.column("m_hat").last().unwrap() - 4.0).abs() <= 1e-6);
}

#[test]
fn missing_omega_is_a_config_error() {
    let (_dir, out) = run_json(r#"{"command":"mass","spacetime":{"kind":"custom","n":3,"f":"log(-tau)","a":-1}}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega"));
}

#[test]
fn bad_expression_reports_position() {
    let (_dir, out) =
        run_json(r#"{"command":"mass","spacetime":{"kind":"custom","n":3,"omega":1,"f":"log(-tau","a":-1}}"#);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("offset 8"), "{err}");
}

#[test]
fn unknown_kind_and_command_are_config_errors() {
    for json in [
        r#"{"command":"mass","spacetime":{"kind":"kerr","n":3}}"#,
        r#"{"command":"plot","spacetime":{"kind":"sads","n":3,"lambda":0,"mass":1}}"#,
    ] {
        assert_eq!(run_json(json).1.status.code(), Some(1));
    }
}

#[test]
fn failed_validation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs_dir().join("validate-iterated-log.json"), dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
    let csv = Csv::read(&dir.path().join("validate.csv"));
    assert!(!csv.rows.is_empty());
}

#[test]
fn every_table_has_digest_and_header() {
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let dir = tempfile::tempdir().unwrap();
        let out = run_config(&path, dir.path(), None);
        assert!(matches!(out.status.code(), Some(0 | 2)), "{}: {:?}", path.display(), out.status);
        let digest: String = Sha256::digest(fs::read(&path).unwrap()).iter().map(|b| format!("{b:02x}")).collect();
        let written = PathBuf::from(String::from_utf8_lossy(&out.stdout).trim());
        let text = fs::read_to_string(&written).unwrap();
        match written.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                assert_eq!(text.lines().next().unwrap(), format!("# config-sha256: {digest}"));
                let csv = Csv::read(&written);
                assert!(csv.header.len() >= 2 && csv.rows.iter().all(|r| r.len() == csv.header.len()));
                assert!(!csv.comments.is_empty());
            }
            Some("json") => {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert_eq!(v["config_sha256"], digest);
                assert!(v["columns"].as_array().is_some_and(|c| !c.is_empty()));
            }
            other => panic!("unexpected output {other:?}"),
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    for name in ["rw-mass.json", "rw-imcf.json", "perturbed-check.json"] {
        let config = configs_dir().join(name);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_config(&config, a.path(), None);
        let second = run_config(&config, b.path(), Some("1"));
        assert!(first.status.success() && second.status.success());
        for entry in fs::read_dir(a.path()).unwrap() {
            let p = entry.unwrap().path();
            assert_eq!(fs::read(&p).unwrap(), fs::read(b.path().join(p.file_name().unwrap())).unwrap(), "{name}");
        }
    }
}

#[test]
fn json_imcf_output_tracks_the_exact_flow() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs_dir().join("rw-imcf.json"), dir.path(), None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("imcf.json")).unwrap()).unwrap();
    let slope = v["details"]["diagnostics"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0 / 3.0).abs() <= 1e-6);
}

#[test]
fn check_residuals_are_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs_dir().join("perturbed-check.json"), dir.path(), None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = Csv::read(&dir.path().join("check.csv"));
    let names: Vec<&str> = csv.rows.iter().map(|r| r[0].as_str()).collect();
    for required in ["conformal_ricci", "gauss_trace_slice", "codazzi_graph", "slab_balance", "einstein_divergence_relative"] {
        assert!(names.contains(&required), "missing {required}");
    }
    for (row, v) in csv.rows.iter().zip(csv.column("residual")) {
        if row[0] == "slab_balance" {
            assert!(v <= 1e-6, "{row:?}");
        }
    }
}
