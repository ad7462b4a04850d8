use std::path::Path;
use std::process::{Command, Output};

fn csr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run csr")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn generate_writes_requested_rows_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = csr(tmp.path(), &["generate", "two-gaussians", "--n", "500", "--outlier-prob", "0.1", "--seed", "7", "--out", "d.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = std::fs::read_to_string(tmp.path().join("d.csv")).unwrap();
    assert_eq!(body.lines().count(), 501);
    assert!(body.starts_with("f1,f2,label\n"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("d.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate two-gaussians");
    assert_eq!(manifest["seeds"]["seed"], 7);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let o = csr(tmp.path(), &["generate", "dns-surrogate", "--windows", "40", "--seed", "1", "--out", "dns.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = std::fs::read_to_string(tmp.path().join("dns.csv")).unwrap();
    assert!(header.starts_with("f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,label\n"));
}

#[test]
fn invalid_fraction_flags_exit_2_and_name_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["generate", "two-gaussians", "--n", "100", "--seed", "1", "--out", "d.csv"];
    let o = csr(tmp.path(), &[&base[..], &["--train-fraction", "1.2", "--calib-fraction", "0.3", "--test-fraction", "0.2"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--train-fraction"), "{}", stderr(&o));
    let o = csr(tmp.path(), &[&base[..], &["--train-fraction", "0.5", "--test-fraction", "0.2"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--calib-fraction"), "{}", stderr(&o));
    let o = csr(tmp.path(), &["generate", "two-gaussians", "--n", "100", "--outlier-prob", "1", "--seed", "1", "--out", "d.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--outlier-prob"), "{}", stderr(&o));
    assert!(!tmp.path().join("d.csv").exists());
}

#[test]
fn missing_seed_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = csr(tmp.path(), &["generate", "two-gaussians", "--n", "100", "--out", "d.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn svdd_without_positive_rows_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "neg.csv", "f1,f2,label\n0,0,-1\n1,1,-1\n");
    let o = csr(tmp.path(), &["train", "--kind", "svdd", "--kernel", "linear", "--seed", "1", "--out", "m.json", "neg.csv"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!tmp.path().join("m.json").exists());
}

#[test]
fn non_convergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "d.csv", "f1,label\n0,1\n1,-1\n0.5,1\n0.4,-1\n");
    let o = csr(
        tmp.path(),
        &["train", "--kind", "lr", "--kernel", "linear", "--max-iterations", "1", "--seed", "1", "--out", "m.json", "d.csv"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn malformed_csv_exits_2_with_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "d.csv", "f1,label\n0,1\n1,0\n");
    let o = csr(tmp.path(), &["train", "--kind", "svm", "--kernel", "linear", "--seed", "1", "--out", "m.json", "d.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

fn pipeline(dir: &Path, dims: &str) {
    let data = if dims == "3d" {
        "f1,f2,f3,label\n0,0,0,1\n0.2,0.1,0,1\n0.1,0.3,0.2,1\n2,2,2,-1\n2.2,1.9,2.1,-1\n1.8,2.1,2,-1\n"
    } else {
        "f1,f2,label\n0,0,1\n0.2,0.1,1\n0.1,0.3,1\n2,2,-1\n2.2,1.9,-1\n1.8,2.1,-1\n"
    };
    write(dir, "d.csv", data);
    let o = csr(dir, &["train", "--kind", "svm", "--kernel", "linear", "--seed", "1", "--out", "m.json", "d.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = csr(dir, &["calibrate", "--model", "m.json", "--out", "p.json", "d.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn region_on_non_2d_model_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path(), "3d");
    let o = csr(
        tmp.path(),
        &["region", "--model", "m.json", "--profile", "p.json", "--epsilon", "0.2", "--bounds", "-1,1,-1,1", "--resolution", "4", "--out", "g.csv"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn calibrate_rejects_empty_input() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path(), "2d");
    write(tmp.path(), "empty.csv", "f1,f2,label\n");
    let o = csr(tmp.path(), &["calibrate", "--model", "m.json", "--out", "p2.json", "empty.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_csv_has_the_fixed_header() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path(), "2d");
    let o = csr(tmp.path(), &["sweep", "--model", "m.json", "--profile", "p.json", "--eps-grid", "0.2,0.5", "--out", "s.csv", "d.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = std::fs::read_to_string(tmp.path().join("s.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,s_eps,n_test,err,err_minus,err_plus,empty_rate,double_rate,single_rate,single_minus_rate,single_plus_rate,csr_error_coverage,csr_mass"
    );
    assert_eq!(lines.count(), 2);
    let o = csr(tmp.path(), &["sweep", "--model", "m.json", "--profile", "p.json", "--eps-grid", "0.5,0.2", "--out", "s2.csv", "d.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_detects_changed_inputs_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    pipeline(tmp.path(), "2d");
    let o = csr(tmp.path(), &["replay", "p.json.manifest.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // a manifest whose recorded output checksum differs must fail
    let path = tmp.path().join("p.json.manifest.json");
    let mut manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    manifest["outputs"][0]["sha256"] = serde_json::Value::String("0".repeat(64));
    std::fs::write(tmp.path().join("bad.manifest.json"), manifest.to_string()).unwrap();
    let o = csr(tmp.path(), &["replay", "bad.manifest.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not byte-identical"), "{}", stderr(&o));

    // so must a changed input
    write(tmp.path(), "d.csv", "f1,f2,label\n0,0,1\n3,3,-1\n");
    let o = csr(tmp.path(), &["replay", "p.json.manifest.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("changed"), "{}", stderr(&o));
}
