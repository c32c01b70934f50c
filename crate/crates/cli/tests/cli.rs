use formlab_core::counting::CountReport;
use formlab_core::exponents::ExponentRow;
use formlab_core::quadrature::Piece;
use formlab_core::{AutClass, AutGroup, BinaryForm, CheckOutcome, IsoVerdict};
use serde_json::Value;
use std::process::{Command, Output};

fn formlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_l55_at_4_1() {
    let o = formlab(&["eval", "--form", "L:d=5,p=5", "--x", "4", "--y", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "-24");
    let f: BinaryForm = serde_json::from_value(v["form"].clone()).unwrap();
    assert_eq!(f.degree(), 5);

    let o = formlab(&["eval", "--form", "coeffs:1,0,-2", "--x", "-3", "--y", "2", "--format", "csv"]);
    assert_eq!(stdout(&o), "x,y,value\n-3,2,1\n");
}

#[test]
fn exponents_csv_has_six_rows() {
    let o = formlab(&["exponents", "--dmax", "8", "--format", "csv", "--decimals", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,eta,kappa,theta");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1], "3,0.612,0.631,0.647");
    assert_eq!(lines[2], "4,0.406,0.428,0.448");
    assert_eq!(lines[6], "8,0.161,0.150,0.177");

    let o = formlab(&["exponents", "--dmax", "5"]);
    let rows: Vec<ExponentRow> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.iter().map(|r| r.d).collect::<Vec<_>>(), vec![3, 4, 5]);
}

#[test]
fn verify_all_exits_zero() {
    let o = formlab(&["verify", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let outcomes: Vec<CheckOutcome> = serde_json::from_value(v["outcomes"].clone()).unwrap();
    assert!(outcomes.len() >= 8);
    assert!(outcomes.iter().all(|c| c.pass));
}

#[test]
fn verify_single_check_csv() {
    let o = formlab(&["verify", "cyclotomic-values", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("name,pass,observed,bound,witness\n"));
}

#[test]
fn usage_errors_exit_two_and_computation_errors_exit_one() {
    assert_eq!(formlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(formlab(&["eval", "--form", "L:d=5,p=5"]).status.code(), Some(2));
    let o = formlab(&["area", "--form", "coeffs:1,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("degree"));
    assert_eq!(formlab(&["verify", "nonsense"]).status.code(), Some(1));
}

#[test]
fn iso_and_aut_round_trip() {
    let o = formlab(&["iso", "--form1", "L:d=5,p=5", "--form2", "L:d=5,p=7"]);
    let v: IsoVerdict = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.kind(), "No");

    let o = formlab(&["iso", "--form1", "coeffs:16,0,0,0,1", "--form2", "coeffs:1,0,0,0,1"]);
    let v: IsoVerdict = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.kind(), "Yes");

    let o = formlab(&["aut", "--form", "qplus:d=2,nu=3"]);
    let g: AutGroup = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g.classification, AutClass::Klein);
    assert_eq!(g.order(), 4);
}

#[test]
fn counts_report_status() {
    let o = formlab(&["count-nn", "--form", "qplus:d=2,nu=3", "--B", "10000"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "exact");
    let r: CountReport = serde_json::from_value(v).unwrap();
    assert_eq!(r.count, 74);

    let o = formlab(&["count-nn", "--form", "qplus:d=2,nu=3", "--B", "10000", "--format", "csv"]);
    assert_eq!(stdout(&o), "B,count,ratio\n10000,74,0.74\n");

    // an indefinite quadratic has no certified box
    let o = formlab(&["count-nn", "--form", "coeffs:1,0,-2", "--B", "50", "--box-cap", "20"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "lower bound");
    let o = formlab(&["count-nn", "--form", "coeffs:1,0,-2", "--B", "50", "--rigorous-only"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn common_values_include_1462() {
    let o = formlab(&["count-common", "--form1", "qplus:d=2,nu=3", "--form2", "qplus:d=2,nu=1", "--N", "2000", "--list"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let vals: Vec<String> = serde_json::from_value(v["values"].clone()).unwrap();
    assert!(vals.iter().any(|s| s == "1462"));
}

#[test]
fn area_json_has_pieces() {
    let o = formlab(&["area", "--form", "qplus:d=2,nu=3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let a = v["value"].as_f64().unwrap();
    assert!((a - 2.622057554).abs() < 1e-7);
    let pieces: Vec<Piece> = serde_json::from_value(v["pieces"].clone()).unwrap();
    assert!(!pieces.is_empty());
}

#[test]
fn coef_sweep_passes() {
    let o = formlab(&["coef", "--family", "qplus", "--dmin", "2", "--dmax", "4", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("d,coef,lower_bound,upper_bound,pass\n"));
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn family_list_is_sorted() {
    let o = formlab(&["family-list", "--family", "qminus", "--dmax", "6"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 3 + 4);
    assert_eq!(names[0], "qminus:d=2,nu=1");
    assert_eq!(names[6], "qminus:d=3,nu=4");
    let degrees: Vec<u64> = rows.iter().map(|r| r["degree"].as_u64().unwrap()).collect();
    assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn fit_csv_and_count_r() {
    let o = formlab(&["fit", "--kind", "nn", "--form", "qplus:d=2,nu=3", "--B", "100,10000", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("B,count,ratio\n"));
    assert!(text.contains("10000,74,0.74"));

    let o = formlab(&["count-r", "--family", "qplus", "--d", "4", "--B", "10000"]);
    let r: CountReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.rigorous);
    assert!(r.count > 0);
}

#[test]
fn threads_flag_does_not_change_counts() {
    let one = formlab(&["count-nn", "--form", "L:d=5,p=7", "--B", "100000", "--threads", "1", "--format", "csv"]);
    let many = formlab(&["count-nn", "--form", "L:d=5,p=7", "--B", "100000", "--threads", "4", "--format", "csv"]);
    assert_eq!(stdout(&one), stdout(&many));
}
