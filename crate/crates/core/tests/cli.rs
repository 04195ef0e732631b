use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rashba(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rashba-qes"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn decoupled_spectrum_writes_full_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = rashba(&["spectrum", "--r", "1/2", "--b", "1/4", "--kappa", "0", "--jmax", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["spectrum.csv", "qes_roots.csv", "validation.csv", "validation.json", "determinants.json", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    // At kappa = 0 the roots are 2n + eps_j ± eps_b.
    let mut roots: Vec<f64> = csv_rows(&dir.path().join("qes_roots.csv"))
        .iter()
        .flat_map(|r| {
            let m: usize = r[5].parse().unwrap();
            std::iter::repeat_n(r[1].parse::<f64>().unwrap(), m)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    let (r, b) = (0.5, 0.25);
    let eps_b = r / 4.0 - b + 0.5;
    let mut expected = Vec::new();
    for j in 0..=1 {
        let eps_j = 0.5 - j as f64 + (3.0 + 2.0 * j as f64) * r / 4.0;
        for n in 0..=j {
            expected.push(2.0 * n as f64 + eps_j + eps_b);
            expected.push(2.0 * n as f64 + eps_j - eps_b);
        }
    }
    expected.sort_by(f64::total_cmp);
    assert_eq!(roots.len(), expected.len());
    for (a, e) in roots.iter().zip(&expected) {
        assert!((a - e).abs() < 1e-12, "{a} vs {e}");
    }
    // A decoupled root is confirmed exactly when it lies in the oscillator
    // spectrum; 1/2 lies below the ground level 3/4 and does not.
    let report = json(&dir.path().join("validation.json"));
    let entries = report["entries"].as_array().unwrap();
    for e in entries {
        let on_level = e["gap"].as_f64().unwrap() < 1e-12;
        assert_eq!(e["verdict"] == "confirmed", on_level, "{e}");
    }
    assert!(entries.iter().any(|e| e["verdict"] == "confirmed"));
    assert!(entries.iter().any(|e| e["root"] == 0.5 && e["verdict"] == "unconfirmed"));
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["params"]["kappa"], "0");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 5);
}

#[test]
fn spectrum_then_validate_on_coupled_point() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--r", "1/2", "--b", "1/4", "--kappa", "3/10"];
    let o = rashba(&[&["spectrum"][..], &args].concat(), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let from_spectrum = fs::read(dir.path().join("validation.csv")).unwrap();
    let o = rashba(&[&["validate"][..], &args].concat(), dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("validation.csv")).unwrap(), from_spectrum);
    let rows = csv_rows(&dir.path().join("validation.csv"));
    // j = 0, 1, 2 give 2 + 4 + 6 roots, of which two are complex.
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[6] == "confirmed" || r[6] == "unconfirmed" || r[6] == "out-of-range"));
}

#[test]
fn missing_parameter_group_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rashba(&["spectrum"], dir.path());
    assert_eq!(code(&o), 2);
    let o = rashba(&["validate", "--r", "1/2", "--b", "0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--kappa"));
    let o = rashba(&["spectrum", "--r", "2", "--b", "0", "--kappa", "1"], dir.path());
    assert_eq!(code(&o), 2);
    let o = rashba(&["spectrum", "--r", "0", "--b", "0", "--kappa", "-1"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_reports_findings_and_detects_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let o = rashba(&["verify"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("verification.json"));
    assert_eq!(v["double_build"]["status"], "pass");
    assert_eq!(v["determinants"]["status"], "finding");
    let verdicts: Vec<&str> =
        v["determinants"]["reports"].as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["match", "match", "typo-suspected"]);

    let o = rashba(&["verify", "--inject-fault"], dir.path());
    assert_eq!(code(&o), 1);
    let v = json(&dir.path().join("verification.json"));
    assert_eq!(v["double_build"]["status"], "mismatch");
}

#[test]
fn kappa_sweep_has_one_row_per_root_and_constant_j0_roots() {
    let dir = tempfile::tempdir().unwrap();
    let o = rashba(
        &["sweep", "--r", "1/2", "--b", "1/4", "--jmax", "2", "--sweep", "kappa:0:1:5"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 5 * (2 + 4 + 6));
    // The j = 0 block is triangular, so its roots do not move with kappa.
    let j0: Vec<Vec<f64>> = (0..5)
        .map(|i| {
            rows.iter()
                .filter(|r| r[0] == i.to_string() && r[6] == "0")
                .map(|r| r[8].parse().unwrap())
                .collect()
        })
        .collect();
    assert!(j0.iter().all(|v| v.len() == 2 && v == &j0[0]), "{j0:?}");
    let kappas: Vec<&str> = rows.iter().filter(|r| r[6] == "0" && r[7] == "0").map(|r| r[2].as_str()).collect();
    assert_eq!(kappas, ["0", "1/4", "1/2", "3/4", "1"]);
}

#[test]
fn r_sweep_accepts_endpoint_below_two_and_rejects_two_in_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = rashba(
        &["sweep", "--b", "0", "--kappa", "1/2", "--jmax", "0", "--sweep", "r:1999/1000:2:2"],
        dir.path(),
    );
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows[0].last().unwrap() == "ok" || rows[0].last().unwrap() == "non-converged", "{:?}", rows[0]);
    assert!(rows[2].last().unwrap().starts_with("error:"), "{:?}", rows[2]);
    assert!(matches!(code(&o), 0 | 3));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--r", "1/3", "--b=-1/8", "--kappa", "0.4", "--jmax", "2"];
    assert_eq!(code(&rashba(&args, a.path())), 0);
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "1"]);
    assert_eq!(code(&rashba(&with_workers, b.path())), 0);
    for f in ["spectrum.csv", "qes_roots.csv", "validation.csv", "validation.json", "determinants.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn physical_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("params.json");
    fs::write(
        &file,
        r#"{"physical": {"effective_mass": 1.0, "confinement_frequency": 3.0, "cyclotron_frequency": 8.0,
            "g_factor": 2.0, "bohr_magneton_times_b": 1.25, "rashba_strength": 0.75, "hbar": 1.0}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = rashba(&["verify", "--physical", file.to_str().unwrap()], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["source"], "physical-file");
    // omega = 5, so r = 8/5, b = 2·1.25/10 = 1/4, kappa = 0.75·√5/5.
    let rec = &manifest["rationalizations"][0];
    assert_eq!(rec["field"], "r");
    assert!(rec["input"].as_str().unwrap().starts_with("1.6"), "{rec}");
    assert_eq!(manifest["config"]["params"]["b"], "1/4");
    assert!(manifest["rationalizations"].as_array().unwrap().len() == 3);

    let o = rashba(&["verify", "--physical", file.to_str().unwrap(), "--r", "0"], &out);
    assert_eq!(code(&o), 2);
}
