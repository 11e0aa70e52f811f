use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_superint");

const I2: [&str; 18] = [
    "--class", "I2", "--kappa", "0.7", "--lambda", "0.5", "--mu", "-0.3", "--nu", "1.3", "--k",
    "0.4", "--ell", "-0.1", "--m", "0.2", "--n", "1",
];

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn verify_passes_for_a_generic_system() {
    let out = run(&[&["verify", "--no-timestamp"][..], &I2].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let names: Vec<&str> = report["identities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["HA", "HB", "HC", "AC-row", "BC-row"]);
    assert_eq!(report["correction_applied"], false);
    assert!(report.get("timestamp").is_none());
}

#[test]
fn reports_carry_a_timestamp_by_default() {
    let out = run(&[&["casimir"][..], &I2].concat());
    assert_eq!(code(&out), 0);
    assert!(json(&out)["timestamp"].is_string());
}

#[test]
fn output_is_reproducible() {
    let args = [&["verify", "--no-timestamp", "--seed", "7"][..], &I2].concat();
    let a = run(&[&args[..], &["--threads", "1"]].concat());
    let b = run(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flat_table_lists_every_row() {
    let out = run(&[
        "tables",
        "--table",
        "T3",
        "--draws",
        "2",
        "--format",
        "human",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let passes = text.lines().filter(|l| l.starts_with("PASS")).count();
    assert_eq!(passes, 11, "{text}");
}

#[test]
fn wrong_curvature_claim_fails() {
    let out = run(&[
        "curvature",
        "--class",
        "II1",
        "--kappa",
        "1.5",
        "--nu",
        "1",
        "--expect",
        "zero",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(
        code(&run(&["verify", "--class", "I1", "--kappa", "abc"])),
        2
    );
    assert_eq!(code(&run(&["verify", "--class", "I1"])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    assert_eq!(code(&run(&["tables", "--row", "NOPE"])), 2);
}

#[test]
fn metadata_rows_are_reported_not_failed() {
    let out = run(&["tables", "--row", "KO_I1", "--format", "human"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("UNVERIFIABLE"));
}

#[test]
fn spec_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(
        &path,
        r#"{"class":"I2","kappa":0.7,"lambda":0.5,"mu":-0.3,"nu":1.3,"k":0.4,"ell":-0.1,"m":0.2,"n":1.0}"#,
    )
    .unwrap();
    let from_file = run(&[
        "verify",
        "--no-timestamp",
        "--spec-file",
        path.to_str().unwrap(),
    ]);
    let from_flags = run(&[&["verify", "--no-timestamp"][..], &I2].concat());
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_flags.stdout);

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        code(&run(&["verify", "--spec-file", path.to_str().unwrap()])),
        2
    );
}

#[test]
fn trajectory_csv_and_domain_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = run(&[
        "trajectory",
        "--class",
        "I1",
        "--nu",
        "2",
        "--xi",
        "1",
        "--eta",
        "0.5",
        "--p-xi",
        "1",
        "--p-eta",
        "-1",
        "--format",
        "csv",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next(), Some("t,xi,eta,p_xi,p_eta,H,A,B,K"));
    assert!(csv.lines().count() > 2);
}

#[test]
fn conserving_trajectory_passes() {
    let out = run(&[
        "trajectory",
        "--class",
        "II3",
        "--kappa",
        "-1.113379",
        "--lambda",
        "-1.475344",
        "--mu",
        "-1.9247",
        "--nu",
        "-1.908656",
        "--k",
        "1.264345",
        "--ell",
        "0.167294",
        "--m",
        "0.764414",
        "--n",
        "0.5259",
        "--xi",
        "1.272214",
        "--eta",
        "0.463721",
        "--p-xi",
        "0.407222",
        "--p-eta",
        "1.905427",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn catalog_dump_is_json() {
    let out = run(&["dump-catalog"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["tables"].as_array().unwrap().len(), 8);
}
