use genkernel::kernel_fourier::{evaluate, FourierParams, Method};
use genkernel::laplace_rational::GeomInvariants;
use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genkernel")).args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn value(v: &Value) -> (f64, f64) {
    (v["value"]["re"].as_f64().unwrap(), v["value"]["im"].as_f64().unwrap())
}

#[test]
fn orthogonal_vectors_give_one() {
    let out = run(&["eval", "--kernel", "fourier", "--a", "2", "--m", "3", "--x", "1,0,0", "--y", "0,0.7,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let (re, im) = value(&v);
    assert!((re - 1.0).abs() < 1e-14 && im.abs() < 1e-14);
    assert_eq!(v["geometry"]["xi"].as_f64(), Some(0.0));
    assert_eq!(v["method"], "closed-a2");
    assert!(v["err_est"].as_f64().unwrap() > 0.0);
}

#[test]
fn rational_a_uses_closed_form_and_matches_series() {
    let base = ["eval", "--kernel", "fourier", "--a", "2/3", "--m", "2", "--x", "1.1,-0.4", "--y", "0.3,1.7"];
    let closed = json_stdout(&run(&base));
    assert_eq!(closed["method"], "halfint-m2");
    assert_eq!(closed["params"]["n"], 3);
    let mut args = base.to_vec();
    args.extend(["--method", "series"]);
    let series = json_stdout(&run(&args));
    assert_eq!(series["method"], "series");
    let (a, b) = (value(&closed), value(&series));
    assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-8);
}

#[test]
fn printed_values_round_trip_exactly() {
    let out = run(&["eval", "--kernel", "fourier", "--a", "0.8", "--m", "4", "--z", "1.7", "--xi", "0.25"]);
    let v = json_stdout(&out);
    let params = FourierParams::new(0.8, 4, Method::Auto).unwrap();
    let direct = evaluate(&params, &GeomInvariants::new(1.7, 0.25, 4).unwrap(), 1e-14).unwrap();
    let (re, im) = value(&v);
    assert_eq!(re.to_bits(), direct.value.re.to_bits());
    assert_eq!(im.to_bits(), direct.value.im.to_bits());
}

#[test]
fn dunkl_auto_matches_closed_integral() {
    let base = ["eval", "--kernel", "dunkl", "--group", "I1", "--alpha", "0.5", "--r1", "1.2", "--phi1", "0.3", "--r2", "0.9", "--phi2", "-1.1"];
    let auto = json_stdout(&run(&base));
    let mut args = base.to_vec();
    args.extend(["--method", "closed"]);
    let closed = json_stdout(&run(&args));
    assert_eq!(closed["method"], "closed-i1");
    let (a, b) = (value(&auto), value(&closed));
    assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-10);
    assert!((auto["geometry"]["z"].as_f64().unwrap() - 1.08).abs() < 1e-15);
}

#[test]
fn dunkl_bessel_from_vectors() {
    let out = run(&[
        "eval", "--kernel", "dunkl-bessel", "--group", "I4", "--alpha", "0.5", "--beta", "0.8", "--x", "1,0.5", "--y", "-0.3,1.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let (re, im) = value(&v);
    assert!(re.abs() <= 1.0 && im.abs() < 1e-12);
}

#[test]
fn table_three_rows() {
    let out = run(&["table", "--kernel", "fourier", "--a", "2", "--m", "3", "--nz", "3", "--nxi", "1", "--xi-min", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["kernel", "a", "n", "m", "z", "xi", "re", "im", "abs", "method", "err_est"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for (row, z) in rows.iter().zip([0.0, 2.5, 5.0]) {
        assert_eq!(row[4].parse::<f64>().unwrap(), z);
        let re: f64 = row[6].parse().unwrap();
        let xi = if z == 0.0 { 0.0 } else { 0.5 };
        assert!((re - (z * xi).cos()).abs() < 1e-13);
    }
}

#[test]
fn table_bounded_and_deterministic() {
    let args = ["table", "--kernel", "fourier", "--a", "2/3", "--m", "4", "--nz", "6", "--nxi", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut rdr = csv::Reader::from_reader(a.stdout.as_slice());
    let mut count = 0;
    for row in rdr.records() {
        let row = row.unwrap();
        assert!(row[8].parse::<f64>().unwrap() <= 1.0 + 1e-8);
        count += 1;
    }
    assert_eq!(count, 30);
}

#[test]
fn dunkl_table_has_point_columns() {
    let out = run(&["table", "--kernel", "dunkl", "--group", "I3", "--alpha", "0.7", "--nr2", "2", "--nphi2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..8], ["kernel", "group", "alpha", "beta", "r1", "phi1", "r2", "phi2"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    // z2 = 0 rows are normalized
    assert!((rows[0][10].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn json_table_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = run(&[
        "table", "--kernel", "fourier", "--a", "1", "--m", "2", "--nz", "2", "--nxi", "2", "--json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[3]["method"], "closed-a1");
}

#[test]
fn verify_specfun_report() {
    let out = run(&["verify", "specfun"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["suite"], "specfun");
    assert_eq!(v["fail_count"], 0);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(v["pass_count"].as_u64().unwrap() as usize, checks.len());
    let exp = checks.iter().find(|c| c["name"] == "ml-exp-collapse").unwrap();
    assert_eq!(exp["status"], "pass");
    assert!(exp["max_error"].as_f64().unwrap() <= exp["budget"].as_f64().unwrap());
}

#[test]
fn verify_failure_exits_one() {
    let out = run(&["verify", "laplace", "--tol", "pn-roots=0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_stdout(&out);
    assert_eq!(v["fail_count"], 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn usage_errors_exit_two_with_json() {
    for args in [
        vec!["eval", "--bogus"],
        vec!["eval", "--kernel", "fourier", "--a", "2", "--m", "3", "--x", "1,0", "--y", "0,1"],
        vec!["eval", "--kernel", "fourier", "--a", "2/0", "--m", "3", "--z", "1", "--xi", "0"],
        vec!["eval", "--kernel", "dunkl", "--group", "I4", "--alpha", "0.5", "--x", "1,0", "--y", "0,1"],
        vec!["eval", "--kernel", "fourier", "--a", "2", "--m", "3", "--z", "1", "--xi", "2"],
        vec!["verify", "nothing"],
        vec!["verify", "--tol", "no-such-check=1"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(e["error"]["kind"], "usage");
        assert!(e["error"]["message"].as_str().unwrap().len() > 3);
    }
}

#[test]
fn numeric_failure_exits_three() {
    let out = run(&["eval", "--kernel", "fourier", "--a", "7", "--m", "3", "--z", "300", "--xi", "0.9"]);
    assert_eq!(out.status.code(), Some(3));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "numeric");
    assert_eq!(e["error"]["code"], 3);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
}
