use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use schauder::geometry::khintchine_constants;
use schauder::io::scenario_from_json;
use schauder::stability::hilbertian_stability_check;
use serde_json::{json, Value};
use tempfile::TempDir;

fn schauder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schauder")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn pert_scenario(epsilon: f64, psi: &str) -> Value {
    json!({
        "P": {"N": 8, "coordinate_blocks": [2, 2, 2, 2]},
        "J": {"transport_of_P": {"epsilon": epsilon, "seed": 7}},
        "psi": psi
    })
}

#[test]
fn euclidean_norm_of_three_four() {
    let out = schauder(&["norm", "--phi", "power:2", "--x", "3,4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "5\n");
    let out = schauder(&["norm", "--norm", "max", "--x", "-3,2"]);
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn khintchine_at_two() {
    let v = json_of(&schauder(&["khintchine", "--p", "2", "--format", "json"]));
    assert_eq!(v["a_p"], 1.0);
    assert_eq!(v["b_p"], 1.0);
    assert!((v["p0"].as_f64().unwrap() - 1.84742).abs() < 5e-5);
}

#[test]
fn values_match_the_library_exactly() {
    let v = json_of(&schauder(&["khintchine", "--p", "1.5", "--format", "json"]));
    let k = khintchine_constants(1.5f64).unwrap();
    assert_eq!(v["a_p"].as_f64().unwrap(), k.a_p);
    assert_eq!(v["p0"].as_f64().unwrap(), k.p0);

    let dir = TempDir::new().unwrap();
    let doc = pert_scenario(0.01, "l2");
    let path = write(&dir, "pert.json", &doc);
    let v = json_of(&schauder(&["similarity", "--scenario", s(&path), "--format", "json"]));
    let sc = scenario_from_json::<f64>(doc).unwrap();
    let lib = hilbertian_stability_check(&sc.p, &sc.j, &sc.psi, sc.c, 256, 0).unwrap();
    assert_eq!(v["similarity_residual"].as_f64().unwrap(), lib.similarity_residual.unwrap());
    assert_eq!(v["sigma"].as_f64().unwrap(), lib.sigma.unwrap());
    assert_eq!(v["verdict"], "similar");
    assert_eq!(v["direction"], "S J_n = P_n S, i.e. J_n = S^-1 P_n S");
}

#[test]
fn replay_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pert.json", &pert_scenario(0.02, "power:3"));
    let run = |name: &str| {
        let out = dir.path().join(name);
        let st = schauder(&[
            "similarity",
            "--scenario",
            s(&path),
            "--format",
            "json",
            "--seed",
            "5",
            "--samples",
            "32",
            "-o",
            s(&out),
        ]);
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        assert!(st.stdout.is_empty());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn negative_verdicts_exit_zero() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "big.json", &pert_scenario(3.0, "l2"));
    let v = json_of(&schauder(&["similarity", "--scenario", s(&path), "--format", "json"]));
    assert_eq!(v["hypothesis_met"], false);
}

#[test]
fn validation_failures_exit_two() {
    let bad_phi = schauder(&["norm", "--phi", "power:0.5", "--x", "1"]);
    assert_eq!(bad_phi.status.code(), Some(2));
    assert!(bad_phi.stdout.is_empty());
    assert!(!bad_phi.stderr.is_empty());

    let missing = schauder(&["similarity", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let not_family = write(&dir, "f.json", &json!({"N": 2, "blocks": [[[1, 0], [0, 1]], [[1, 0], [0, 0]]]}));
    assert_eq!(schauder(&["constants", "--family", s(&not_family)]).status.code(), Some(2));

    let bad_grid = schauder(&["sweep", "--parameter", "p", "--grid", "1,3,2"]);
    assert_eq!(bad_grid.status.code(), Some(2));
    assert_eq!(schauder(&["khintchine"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three() {
    // one block that is not the identity: the Gram operator is singular
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "partial.json", &json!({"N": 2, "blocks": [[[1, 0], [0, 0]]]}));
    let out = schauder(&["constants", "--family", s(&f), "--which", "riesz", "--allow-incomplete"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn constants_as_csv() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "coord.json", &json!({"N": 4, "coordinate_blocks": [1, 1, 2]}));
    let out = schauder(&["constants", "--family", s(&f), "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,value,method,witness,trials,upper_bound,lower_bound");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 1.0), "{text}");
}

#[test]
fn epsilon_sweep_sigma_column_increases() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pert.json", &pert_scenario(0.0, "l2"));
    let v = json_of(&schauder(&[
        "sweep",
        "--parameter",
        "epsilon",
        "--grid",
        "log:1e-3:1e-1:6",
        "--scenario",
        s(&path),
        "--format",
        "json",
    ]));
    let sigma: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["sigma"].as_f64().unwrap()).collect();
    assert_eq!(sigma.len(), 6);
    assert!(sigma.windows(2).all(|w| w[1] > w[0]), "{sigma:?}");
}

#[test]
fn angle_sweep_theta_is_sine() {
    let out = schauder(&["sweep", "--parameter", "angle", "--grid", "lin:1:89:23", "--format", "csv"]);
    let text = stdout(&out);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let deg: f64 = rec[0].parse().unwrap();
        let theta: f64 = rec[1].parse().unwrap();
        assert!((theta - deg.to_radians().sin()).abs() < 1e-6);
        n += 1;
    }
    assert_eq!(n, 23);
}

#[test]
fn p_sweep_is_continuous() {
    let v = json_of(&schauder(&["sweep", "--parameter", "p", "--grid", "lin:1:3:201", "--format", "json"]));
    let rows = v.as_array().unwrap();
    for w in rows.windows(2) {
        for key in ["a_p", "b_p"] {
            let jump = (w[1][key].as_f64().unwrap() - w[0][key].as_f64().unwrap()).abs();
            assert!(jump < 0.01, "{key} jumps by {jump} near p = {}", w[0]["p"]);
        }
    }
}

#[test]
fn c0_check_reads_the_constant() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "P": {"N": 6, "norm": "max", "coordinate_blocks": [2, 2, 2]},
        "J": {"transport_of_P": {"epsilon": 0.01, "seed": 3}}
    });
    let path = write(&dir, "c0.json", &doc);
    assert_eq!(schauder(&["c0-check", "--scenario", s(&path)]).status.code(), Some(2));
    let v = json_of(&schauder(&["c0-check", "--scenario", s(&path), "--c", "1", "--format", "json"]));
    assert_eq!(v["sigma_method"], "exact-enumeration");
    assert_eq!(v["verdict"], "similar");
}

#[test]
fn opening_and_lambda() {
    let v = json_of(&schauder(&["opening", "--angle", "30", "--format", "json"]));
    assert!((v["theta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "coord.json", &json!({"N": 4, "coordinate_blocks": [2, 2]}));
    let v = json_of(&schauder(&["lambda", "--family", s(&f), "--format", "json"]));
    assert_eq!(v["lambda"], 0.0625);
}
