//! End-to-end CLI tests: generate / dims / flatness / measure / eta /
//! pipeline round trips and the exit-code contract.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reifdim"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn generate_then_dims_round_trip() {
    let cloud = tmp("comb.csv");
    let status = bin()
        .args(["generate", "--kind", "comb", "--j", "0", "--n", "1"])
        .args(["--slabs", "1000", "--h", "1e-9"])
        .arg("--out")
        .arg(&cloud)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(cloud.with_extension("spec.json").exists());

    let report = tmp("comb_dims.json");
    let loglog = tmp("comb_loglog.csv");
    let out = bin()
        .args(["dims", "--ladder", "0.125:0.5:8", "--json"])
        .arg("--in")
        .arg(&cloud)
        .arg("--out")
        .arg(&report)
        .arg("--emit-loglog")
        .arg(&loglog)
        .output()
        .unwrap();
    assert!(out.status.success());
    let est: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = est["global"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
    let loglog_text = std::fs::read_to_string(&loglog).unwrap();
    assert!(loglog_text.lines().count() == 9); // header + 8 scales
}

#[test]
fn flatness_report_on_patch() {
    let cloud = tmp("patch.csv");
    assert!(bin()
        .args(["generate", "--kind", "plane-patch", "--j", "1", "--n", "2"])
        .args(["--rho0", "1.0", "--h", "1e-3"])
        .arg("--out")
        .arg(&cloud)
        .status()
        .unwrap()
        .success());

    let report = tmp("patch_flatness.json");
    let out = bin()
        .args([
            "flatness",
            "--j",
            "1",
            "--ladder",
            "0.5:0.5:5",
            "--sided",
            "one",
            "--base-count",
            "4",
        ])
        .arg("--in")
        .arg(&cloud)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let props = parsed["verdict"]["properties"].as_array().unwrap();
    assert_eq!(props.len(), 12);
    assert!(props.iter().all(|p| p["consistent"].as_bool().unwrap()));
}

#[test]
fn measure_and_eta_commands() {
    let cloud = tmp("segment.csv");
    assert!(bin()
        .args(["generate", "--kind", "plane-patch", "--j", "1", "--n", "2"])
        .args(["--rho0", "0.5", "--h", "0.00025"])
        .arg("--out")
        .arg(&cloud)
        .status()
        .unwrap()
        .success());
    let out = bin()
        .args(["measure", "--j", "1", "--scale", "0.02", "--json"])
        .arg("--in")
        .arg(&cloud)
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratio = rep["ratio"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");

    let out = bin()
        .args(["eta", "--delta", "0.0625", "--n", "2", "--j", "1", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eta = rep["eta"].as_f64().unwrap();
    assert!(eta > 0.0 && eta < 2.0);
    // branch value above 1/8
    let out = bin()
        .args(["eta", "--delta", "0.2", "--n", "3", "--j", "1", "--json"])
        .output()
        .unwrap();
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["eta"].as_f64().unwrap(), 3.0);
}

#[test]
fn pipeline_key_value_config() {
    let spec = tmp("koch.pipeline");
    std::fs::write(
        &spec,
        "kind=koch\ntheta=1.0471975511965976\ndepth=6\nflatness_j=1\nflatness_ladder=0.3:0.5:4\nflatness_base_count=6\n",
    )
    .unwrap();
    let out_dir = tmp("pipeline_cli_out");
    let out = bin()
        .arg("pipeline")
        .arg("--spec")
        .arg(&spec)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--json")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        manifest["summary"]["flatness_all_consistent"],
        serde_json::json!(false)
    );
    assert!(out_dir.join("manifest.json").exists());
    assert!(out_dir.join("flatness.json").exists());
}

#[test]
fn union_command() {
    let a = tmp("arm_a.csv");
    let b = tmp("arm_b.csv");
    for (path, extra) in [(&a, ["--rho0", "1.0"]), (&b, ["--rho0", "0.5"])] {
        assert!(bin()
            .args([
                "generate",
                "--kind",
                "plane-patch",
                "--j",
                "1",
                "--n",
                "2",
                "--h",
                "0.01"
            ])
            .args(extra)
            .arg("--out")
            .arg(path)
            .status()
            .unwrap()
            .success());
    }
    let u = tmp("union.csv");
    let inputs = format!("{},{}", a.display(), b.display());
    assert!(bin()
        .args(["generate", "--kind", "finite-union", "--inputs", &inputs])
        .arg("--out")
        .arg(&u)
        .status()
        .unwrap()
        .success());
    let cloud = reifdim::io::read_cloud(&u).unwrap();
    assert_eq!(cloud.len(), 201 + 101);
}

#[test]
fn input_error_exits_2() {
    // missing file
    let out = bin()
        .args([
            "dims",
            "--ladder",
            "0.5:0.5:5",
            "--in",
            "/nonexistent/cloud.csv",
            "--out",
            "/tmp/x.json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // ladder below the sampling floor
    let cloud = tmp("floor.csv");
    assert!(bin()
        .args([
            "generate",
            "--kind",
            "plane-patch",
            "--j",
            "1",
            "--n",
            "2",
            "--h",
            "0.01",
            "--rho0",
            "1.0"
        ])
        .arg("--out")
        .arg(&cloud)
        .status()
        .unwrap()
        .success());
    let out = bin()
        .args(["dims", "--ladder", "0.01:0.5:5"])
        .arg("--in")
        .arg(&cloud)
        .args(["--out", "/tmp/y.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // malformed ladder
    let out = bin()
        .args(["dims", "--ladder", "bogus"])
        .arg("--in")
        .arg(&cloud)
        .args(["--out", "/tmp/z.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn global_out_dir_prefixes_relative_outputs() {
    let dir = tmp("global_out");
    let out = bin()
        .arg("--out-dir")
        .arg(&dir)
        .args(["generate", "--kind", "plane-patch", "--j", "1", "--n", "2"])
        .args(["--rho0", "1.0", "--h", "0.1", "--out", "p.csv"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("p.csv").exists());
    assert!(dir.join("p.spec.json").exists());
}

#[test]
fn verify_table_cli_smoke() {
    let out_dir = tmp("table_out");
    let out = bin()
        .arg("verify-table")
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--json")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["failed"], serde_json::json!(0));
    assert!(rep["confirmed"].as_u64().unwrap() >= 18);
    assert!(out_dir.join("table_report.json").exists());
}
