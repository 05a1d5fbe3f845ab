use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matrange"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = run(dir, args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn gen(dir: &Path, name: &str, args: &[&str]) {
    let mut a = vec!["generate"];
    a.extend(args);
    a.extend(["--out", name]);
    assert_eq!(code(dir, &a), 0);
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn numrange_segment_circle_and_refinement() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    gen(d, "diag.json", &["--kind", "diag", "--values", "0,1"]);
    let b = ok(d, &["compute", "numrange", "--input", "diag.json", "--angles", "32", "--svg", "seg.svg"]);
    assert_eq!(b["shape"], "segment");
    let svg = std::fs::read_to_string(d.join("seg.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));

    gen(d, "jordan.json", &["--kind", "jordan"]);
    let b = ok(d, &["compute", "numrange", "--input", "jordan.json", "--angles", "128"]);
    for v in b["vertices"].as_array().unwrap() {
        let z = floats(v);
        assert!(((z[0] * z[0] + z[1] * z[1]).sqrt() - 1.0).abs() < 1e-6);
    }

    gen(d, "gin.json", &["--kind", "ginibre", "--n", "5", "--seed", "3"]);
    let gaps: Vec<f64> = [8, 32, 256]
        .iter()
        .map(|k| ok(d, &["compute", "numrange", "--input", "gin.json", "--angles", &k.to_string()])["hausdorff_gap"].as_f64().unwrap())
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn sampling_examples() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    gen(d, "s.json", &["--kind", "scalar", "--values", "2,-1", "--n", "5"]);
    let c = ok(d, &["sample", "pq", "--input", "s.json", "--p", "2", "--q", "2", "--count", "4"]);
    let pts = c["points"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    for p in pts {
        let f = floats(p);
        assert!((f[0] - 2.0).abs() < 1e-12 && (f[4] + 1.0).abs() < 1e-12);
    }

    gen(d, "d.json", &["--kind", "diag", "--values", "1,2,3,4"]);
    let args = ["sample", "pq", "--input", "d.json", "--p", "2", "--q", "1", "--count", "6", "--seed", "5"];
    let c = ok(d, &args);
    for p in c["points"].as_array().unwrap() {
        let x = floats(p)[0];
        assert!((2.0 - 1e-6..=3.0 + 1e-6).contains(&x));
    }
    assert_eq!(run(d, &args).stdout, run(d, &args).stdout);
    assert_ne!(
        run(d, &args).stdout,
        run(d, &["sample", "pq", "--input", "d.json", "--p", "2", "--count", "6", "--seed", "6"]).stdout
    );
}

#[test]
fn construct_examples() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    gen(d, "d12.json", &["--kind", "diag", "--values", "1,2,3,4,5,6,7,8,9,10,11,12"]);
    let t = ok(d, &["construct", "tverberg", "--input", "d12.json", "--p", "2"]);
    assert!(t["certificate"]["certificate"]["residual"].as_f64().unwrap() <= 1e-8);
    assert!(t["isometry_defect"].as_f64().unwrap() <= 1e-8);

    gen(d, "s.json", &["--kind", "scalar", "--values", "0.5,3", "--n", "9"]);
    let c = ok(d, &["construct", "star-center", "--input", "s.json"]);
    let pt = floats(&c["certificate"]["point"]);
    assert!((pt[0] - 0.5).abs() < 1e-12 && (pt[1] - 3.0).abs() < 1e-12);

    gen(d, "sp.json", &["--kind", "spiked"]);
    let e = ok(d, &["construct", "essential", "--input", "sp.json", "--r-max", "4"]);
    let iv = floats(&e["intervals"][1]);
    assert!(iv[0].abs() < 1e-6 && (iv[1] - 1.0).abs() < 1e-6);

    gen(d, "g.json", &["--kind", "gue", "--m", "2", "--n", "16"]);
    let s = ok(d, &["construct", "segment", "--input", "g.json", "--t", "0.5"]);
    assert!(s["certificate"]["residual"].as_f64().unwrap() <= 1e-8);
    std::fs::write(d.join("seg.json"), serde_json::to_string(&s).unwrap()).unwrap();
    let s2 = ok(d, &["construct", "segment", "--input", "g.json", "--t", "0.5", "--from", "seg.json"]);
    assert!(s2["certificate"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn verify_examples() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    let r = ok(d, &["verify", "bounds", "--m", "2", "--k", "2"]);
    assert!(r["passes"].as_u64().unwrap() >= 48);
    let r = ok(d, &["verify", "convexity", "--ensemble", "pauli", "--trials", "3", "--samples", "200"]);
    assert_eq!(r["expected_failure"], true);
    assert_eq!(r["passes"], 3);
    let r = ok(d, &["verify", "star", "--planted", "--trials", "3"]);
    assert_eq!(r["passes"], r["trials"]);
    ok(d, &["verify", "inclusions", "--interlacing", "--n", "9", "--p", "4", "--r", "2", "--trials", "10"]);
    ok(d, &["verify", "perturbation", "--planted", "--n", "6", "--trials", "3"]);
    let r = ok(d, &["verify", "bounds", "--trials", "2", "--timing"]);
    assert!(r["wall_time"].as_f64().is_some());
    assert!(ok(d, &["verify", "bounds", "--trials", "2"]).get("wall_time").is_none());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    write(d, "bad.json", "{\"schema_version\":\"1\",");
    assert_eq!(code(d, &["sample", "pq", "--input", "bad.json"]), 2);
    assert_eq!(code(d, &["sample", "pq", "--input", "missing.json"]), 2);
    write(
        d,
        "nh.json",
        "{\"schema_version\":\"1\",\"m\":1,\"n\":2,\"hermitian\":true,\"matrices\":[[[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]]}\n",
    );
    let out = run(d, &["sample", "pq", "--input", "nh.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entry (0, 1)"));

    gen(d, "d.json", &["--kind", "diag", "--values", "1,2,3,4"]);
    assert_eq!(code(d, &["sample", "pq", "--input", "d.json", "--p", "3", "--q", "2"]), 3);
    gen(d, "g3.json", &["--kind", "gue", "--m", "3", "--n", "3"]);
    assert_eq!(code(d, &["compute", "numrange", "--input", "g3.json"]), 3);

    // A generic 4x4 pair has an empty rank-4 range, so no center is found.
    gen(d, "g4.json", &["--kind", "gue", "--m", "2", "--n", "4"]);
    let out = run(d, &["construct", "star-center", "--input", "g4.json", "--restarts", "3"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rejected"], true);

    let out = run(d, &["verify", "bounds", "--trials", "3", "--restarts", "1", "--accept-tol", "1e-300", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(5));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["passes"], 0);
}

#[test]
fn config_file_and_flag_precedence() {
    let d = tempfile::tempdir().unwrap();
    let d = d.path();
    gen(d, "d.json", &["--kind", "diag", "--values", "1,2,3,4"]);
    write(d, "c.toml", "seed = 11\naccept_tol = 1e-9\n");
    let from_file = run(d, &["sample", "pq", "--input", "d.json", "--count", "3", "--config", "c.toml"]).stdout;
    let from_flag = run(d, &["sample", "pq", "--input", "d.json", "--count", "3", "--seed", "11", "--accept-tol", "1e-9"]).stdout;
    assert_eq!(from_file, from_flag);
    let overridden = run(d, &["sample", "pq", "--input", "d.json", "--count", "3", "--config", "c.toml", "--seed", "12"]).stdout;
    assert_ne!(from_file, overridden);
    let v: Value = serde_json::from_slice(&from_file).unwrap();
    assert_eq!(v["provenance"]["accept_tol"].as_f64(), Some(1e-9));
    write(d, "bad.toml", "sede = 1\n");
    assert_eq!(code(d, &["sample", "pq", "--input", "d.json", "--config", "bad.toml"]), 2);
}
