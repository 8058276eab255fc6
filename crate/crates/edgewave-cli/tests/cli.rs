use std::process::{Command, Output};

fn edgewave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgewave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tw_json_record() {
    let o = edgewave(&["tw", "--s", "-6", "--nodes", "120", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = &v.as_array().unwrap()[0];
    let logdet = rec["logdet"].as_f64().unwrap();
    let asymptote = rec["asymptote"].as_f64().unwrap();
    assert!((logdet + 18.3602870437379647).abs() < 1e-12);
    assert_eq!(rec["residual"].as_f64().unwrap(), logdet - asymptote);
}

#[test]
fn hierarchy_show() {
    let o = edgewave(&["hierarchy", "show", "--j", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "-1/4 q_xxxx + 5 q q_xx + 5/2 q_x^2 - 10 q^3\n");
}

#[test]
fn exit_codes() {
    assert_eq!(edgewave(&["tw", "--bogus"]).status.code(), Some(2));
    assert_eq!(edgewave(&["nonsense"]).status.code(), Some(2));
    let o = edgewave(&["hierarchy", "show", "--j", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("j <= 8"));
    assert_eq!(edgewave(&["asy", "--k", "1", "--s", "2", "--x", "0"]).status.code(), Some(1));
}

#[test]
fn csv_is_deterministic_with_fixed_digits() {
    let args = ["tw", "--from", "-4", "--to", "0", "--points", "5", "--nodes", "60"];
    let a = stdout(&edgewave(&args));
    let b = stdout(&edgewave(&args));
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next().unwrap(), "s,logdet,dlogdet_ds,asymptote,residual");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "-4.0000000000000000e0");
    assert_eq!(a.lines().count(), 6);
}

#[test]
fn thread_cap_gives_identical_output() {
    let args = ["tw", "--from", "-3", "--to", "-1", "--points", "3", "--nodes", "40"];
    let capped = Command::new(env!("CARGO_BIN_EXE_edgewave"))
        .args(args)
        .env("EDGEWAVE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&capped), stdout(&edgewave(&args)));
    let bad = Command::new(env!("CARGO_BIN_EXE_edgewave"))
        .args(args)
        .env("EDGEWAVE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn asy_itemizes_every_term() {
    let o = edgewave(&["asy", "--k", "2", "--s", "-7", "--x", "40", "--ih", "0.3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = v[0].as_object().unwrap();
    let names = [
        "quartic_power", "cross", "quadratic", "log_term", "ih_term", "power_x", "log_x", "const_block",
    ];
    let sum: f64 = names.iter().map(|n| rec[*n].as_f64().unwrap()).sum();
    let total = rec["total"].as_f64().unwrap();
    assert!((sum - total).abs() < 1e-12 * total.abs());
    assert_eq!(rec["ih_term"].as_f64().unwrap(), -0.3);
}

#[test]
fn gfun_scaffold_transition_tables() {
    let g = stdout(&edgewave(&["gfun", "--k", "1", "--r", "0.5", "--y", "-1", "--points", "3"]));
    assert!(g.starts_with("eta,theta,g1,g1_remainder,d1,g2,g2_remainder,d2,region\n"));
    assert_eq!(g.lines().count(), 4);
    let s = stdout(&edgewave(&["scaffold", "--k", "1", "--s", "-1000", "--sign", "-1"]));
    assert!(s.lines().next().unwrap().contains("cancellation"));
    let t = stdout(&edgewave(&["transition", "--k", "1", "--s", "-40", "--stilde", "-3"]));
    assert!(t.lines().next().unwrap().ends_with("defect"));
}

#[test]
fn verify_quick_reports_every_criterion() {
    let o = edgewave(&["verify", "--quick"]);
    let text = stdout(&o);
    let verdicts: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(verdicts.len(), 11);
    // The constant-block spread cannot hold as stated, so plain verify
    // exits nonzero; every other criterion passes.
    let fails: Vec<&&str> = verdicts.iter().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 1);
    assert!(fails[0].contains("known unattainable"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(edgewave(&["verify", "--quick", "--allow-known"]).status.code(), Some(0));
}
