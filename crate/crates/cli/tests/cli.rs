use std::path::Path;
use std::process::{Command, Output};

use risbound_core::io::{load_model, save_model};
use risbound_core::{CMatrix, CVector, ModelParameters, C64};

fn risbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn value(rows: &[Vec<String>], method: &str) -> String {
    rows.iter().find(|r| r[3] == method).unwrap()[4].clone()
}

fn write_toy(path: &Path) {
    let m = ModelParameters::new(
        C64::new(-1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        CVector::from_element(1, C64::new(1.0, 0.0)),
        CVector::from_element(1, C64::new(1.0, 0.0)),
        CMatrix::zeros(1, 1),
    )
    .unwrap();
    save_model(&m, path).unwrap();
}

#[test]
fn toy_bounds_equal_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("toy.json");
    write_toy(&model);
    let m = model.to_str().unwrap();

    let out = risbound(&["bound", "--model", m]);
    assert_eq!(out.status.code(), Some(0));
    let b = rows(&stdout(&out));
    assert_eq!(b.len(), 4);
    assert_eq!(value(&b, "NI"), "1");
    assert_eq!(value(&b, "IBD"), "1");
    assert!((value(&b, "SDR").parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    assert!(b.iter().all(|r| r[0] == "toy" && r[2] == "PM" && r[6] == "true"));

    let out = risbound(&["optimize", "--model", m, "--methods", "es"]);
    assert_eq!(out.status.code(), Some(0));
    let o = rows(&stdout(&out));
    assert_eq!(value(&o, "ES"), "1");
    // log2(1 + 10 / 1e-5)
    assert!((o[0][5].parse::<f64>().unwrap() - 1_000_001f64.log2()).abs() < 1e-10);
}

#[test]
fn generated_model_round_trips_through_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let m = model.to_str().unwrap();
    let out = risbound(&["gen", "--ns", "5", "--seed", "2", "--loads", "pin", "--reciprocal", "--out", m]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let th = load_model(&model).unwrap();
    assert_eq!(th.n_s(), 5);
    assert_eq!(th.alpha(), risbound_core::scenario::LoadSet::PIN.alpha);

    let out = risbound(&["bound", "--model", m, "--bounds", "ibd,ni"]);
    let b = rows(&stdout(&out));
    assert_eq!(value(&b, "IBD"), "N/A");
    assert_eq!(b.iter().find(|r| r[3] == "IBD").unwrap()[6], "false");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn single_point_sweep_matches_bound() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("s.json");
    let m = model.to_str().unwrap();
    risbound(&["gen", "--ns", "4", "--seed", "9", "--out", m]);
    let bound = risbound(&["bound", "--model", m, "--bounds", "ni,ibd,sdr"]);
    let sweep = risbound(&["sweep", "--model", m, "--ns", "4", "--bounds", "ni,ibd,sdr", "--methods", ""]);
    assert_eq!(sweep.status.code(), Some(0));
    assert_eq!(stdout(&bound), stdout(&sweep));

    let sweep = risbound(&["sweep", "--model", m, "--ns", "1,2,3", "--bounds", "sdr", "--methods", "es"]);
    let r = rows(&stdout(&sweep));
    assert_eq!(r.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["1", "1", "2", "2", "3", "3"]);
    for pair in r.chunks(2) {
        let sdr: f64 = pair[0][4].parse().unwrap();
        let es: f64 = pair[1][4].parse().unwrap();
        assert!(es <= sdr * (1.0 + 1e-6) + 1e-9);
    }
}

#[test]
fn json_output_parses() {
    let out = risbound(&["bound", "--generate", "3", "--seed", "1", "--bounds", "ni,sdr", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["points"][0]["n_s"], 3);
    assert_eq!(v["points"][0]["bounds"][1]["kind"], "SDR");
    assert!(v["points"][0]["bounds"][1]["diagnostics"]["lifted_effective_rank"].is_number());
}

#[test]
fn config_errors_exit_with_status_2() {
    let missing = risbound(&["bound", "--model", "/nonexistent/model.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(missing.stderr.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(record["error"], "config");
    assert_eq!(record["exit_code"], 2);

    assert_eq!(risbound(&["bound", "--generate", "2", "--bounds", "xyz"]).status.code(), Some(2));
    assert_eq!(risbound(&["bound", "--generate", "2", "--loads", "gold"]).status.code(), Some(2));
    assert_eq!(risbound(&["bound", "--generate", "2", "--pt-mw", "0"]).status.code(), Some(2));
    assert_eq!(risbound(&["sweep", "--generate", "3", "--ns", "5"]).status.code(), Some(2));
    assert_eq!(risbound(&["optimize", "--generate", "25", "--methods", "es"]).status.code(), Some(2));
    assert_eq!(risbound(&["bound"]).status.code(), Some(2));
    assert_eq!(risbound(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let first = risbound(&["verify", "--seed", "5", "--count", "6", "--out", a.to_str().unwrap()]);
    let second = risbound(&["verify", "--seed", "5", "--count", "6", "--jobs", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("scenario,n_s,load_set,check,value,tolerance,pass,note,seed\n"));
}
