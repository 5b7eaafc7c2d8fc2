use std::process::Command;

use stokes_nlie::benchmark::row;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stokes-nlie"))
}

fn energies(csv: &str) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect()
}

#[test]
fn nlie_levels_match_benchmark_row() {
    let out = bin()
        .args(["nlie", "--M", "3", "--alpha", "1", "--parity", "+1", "--levels", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,M,alpha,eps,parity,j,E,theta,residual,err_est\n"));
    let e = energies(&text);
    assert_eq!(e.len(), 2);
    let r = row(1.0).unwrap();
    assert!(((e[0] - r.reference[0]) / r.reference[0]).abs() < 5e-3);
    assert!(e[1] > e[0]);
}

#[test]
fn alpha_above_m_exits_with_validation_code() {
    let out = bin().args(["nlie", "--alpha", "4", "--M", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha <= M"));
}

#[test]
fn wronskian_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.csv");
    let st = bin()
        .args(["verify", "--check", "wronskian", "--out", p.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["check", "param_json", "value", "tolerance", "pass"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| &r[4] == "true"));
}

#[test]
fn output_is_deterministic_and_config_driven() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "alpha = -2\nlevels = 3\nparity = +1\n").unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let st = bin()
            .args(["oracle", "--config", conf.to_str().unwrap(), "--out", p.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let e = energies(std::str::from_utf8(&a).unwrap());
    assert_eq!(e.len(), 3);
    assert!((e[0] - 0.44007).abs() < 5e-4 * 0.44007);

    // flags override the file
    let out = bin()
        .args(["wkb", "--config", conf.to_str().unwrap(), "--levels", "1", "--format", "json"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["E"], "0*");
}

#[test]
fn curves_file_has_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("curves.csv");
    let st = bin()
        .args(["nlie", "--alpha", "0.5", "--parity", "-1", "--levels", "1", "--curves", p.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success());
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta,re_lnA_plus,im_lnA_plus,re_lnA_minus,im_lnA_minus");
    assert_eq!(lines.count(), 4096);
}
