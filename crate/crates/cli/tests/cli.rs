use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiplets"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["count", "--help"])), 0);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["count", "--pattern", "0,2"])), 1);
    assert_eq!(
        code(&run(&["count", "--pattern", "0,3", "--limit", "100"])),
        1
    );
    assert_eq!(
        code(&run(&["count", "--pattern", "0,2", "--limit", "1.5"])),
        1
    );
    assert_eq!(code(&run(&["sieve", "--from", "0", "--to", "10"])), 1);
    assert_eq!(code(&run(&["hl", "--m", "7"])), 1);
    assert_eq!(code(&run(&["--threads", "0", "hl", "--m", "2"])), 1);
}

#[test]
fn odd_gap_is_a_domain_error() {
    let o = run(&["predict", "--gaps", "2,3"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("gap"));
}

#[test]
fn sieve_lists_primes() {
    let o = run(&["sieve", "--from", "10", "--to", "30", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let primes: Vec<u64> = serde_json::from_value(v["primes"].clone()).unwrap();
    assert_eq!(primes, [11, 13, 17, 19, 23, 29]);
}

#[test]
fn json_is_identical_across_thread_counts() {
    for args in [
        &[
            "count",
            "--pattern",
            "0,2,6,8",
            "--limit",
            "2e6",
            "--segment",
            "65536",
        ][..],
        &["hl", "--m", "2..6", "--prime-bound", "3e6"][..],
        &[
            "verify",
            "--limit",
            "1e6",
            "--segment",
            "100000",
            "--prime-bound",
            "1e6",
        ][..],
    ] {
        let with = |t: &str| {
            let mut all = vec!["--threads", t, "--format", "json"];
            all.extend_from_slice(args);
            let o = run(&all);
            assert!(matches!(code(&o), 0 | 2), "{}", stderr(&o));
            o.stdout
        };
        assert_eq!(with("1"), with("4"), "{args:?}");
    }
}

#[test]
fn count_agrees_with_known_twin_count() {
    let o = run(&[
        "count",
        "--pattern",
        "0,2",
        "--limit",
        "1e6",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 8169);
    assert_eq!(v["complete"], true);
}

#[test]
fn csv_header_matches_record_fields() {
    let o = run(&[
        "verify",
        "--limit",
        "1e6",
        "--format",
        "csv",
        "--prime-bound",
        "1e6",
    ]);
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(
        header,
        "pattern,limit,count,li_value,c_estimate,conjectured,deviation,relative_deviation,c_m,ratio,threshold,passed"
    );

    let o = run(&[
        "predict",
        "--gaps",
        "2",
        "--limit",
        "1e5",
        "--format",
        "csv",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "gap,factor,predicted,limit,count,c_estimate,deviation,relative_deviation"
    );
}

#[test]
fn checkpoint_stop_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let cp = path.to_str().unwrap();
    let base = [
        "--format",
        "json",
        "count",
        "--pattern",
        "0,2,6",
        "--limit",
        "3e6",
        "--segment",
        "1e5",
        "--checkpoint",
        cp,
    ];

    let mut first = base.to_vec();
    first.extend(["--stop-after", "10", "--checkpoint-every", "1"]);
    let o = run(&first);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["complete"], false);
    assert_eq!(v["covered_through"], 1_000_000);

    let o = run(&base);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let resumed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();

    let o = run(&[
        "--format",
        "json",
        "count",
        "--pattern",
        "0,2,6",
        "--limit",
        "3e6",
        "--segment",
        "1e5",
    ]);
    let fresh: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(resumed, fresh);
}

#[test]
fn corrupt_checkpoint_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    fs::write(&path, "{\"format\":\"something else\"}").unwrap();
    let o = run(&[
        "count",
        "--pattern",
        "0,2",
        "--limit",
        "1e6",
        "--checkpoint",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn verify_exceeding_threshold_exits_two() {
    let o = run(&[
        "verify",
        "--limit",
        "1e6",
        "--max-m",
        "2",
        "--threshold",
        "1e-12",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(code(&o), 2);
    let o = run(&[
        "verify",
        "--limit",
        "1e6",
        "--max-m",
        "2",
        "--threshold",
        "1",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_warns_at_tiny_limits() {
    let o = run(&["verify", "--limit", "100", "--prime-bound", "1e6"]);
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn predict_ratios_follow_the_gap_factor() {
    let o = run(&[
        "predict",
        "--gaps",
        "2,4,6,30",
        "--format",
        "json",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(code(&o), 0);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let factors: Vec<f64> = rows.iter().map(|r| r["factor"].as_f64().unwrap()).collect();
    assert_eq!(factors, [1.0, 1.0, 2.0, 8.0 / 3.0]);
    let p: Vec<f64> = rows
        .iter()
        .map(|r| r["predicted"].as_f64().unwrap())
        .collect();
    assert_eq!(p[0], p[1]);
    assert!((p[2] / p[0] - 2.0).abs() < 1e-15);
}

#[test]
fn hl_range_lists_each_m() {
    let o = run(&[
        "hl",
        "--m",
        "2..5",
        "--format",
        "json",
        "--prime-bound",
        "1e7",
    ]);
    assert_eq!(code(&o), 0);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let ms: Vec<u64> = rows.iter().map(|r| r["m"].as_u64().unwrap()).collect();
    assert_eq!(ms, [2, 3, 4, 5]);
    assert!((rows[0]["value"].as_f64().unwrap() - 0.6601618).abs() < 1e-6);
}

#[test]
fn table_output_is_readable() {
    let o = run(&["li", "--m", "1", "--upper", "1e6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("78626.50"), "{}", stdout(&o));
}

#[test]
fn ratios_and_predict_warn_at_small_limits() {
    let o = run(&[
        "ratios",
        "--m",
        "2",
        "--limit",
        "1000",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    let o = run(&[
        "predict",
        "--gaps",
        "2,4",
        "--limit",
        "1000",
        "--prime-bound",
        "1e6",
    ]);
    assert_eq!(stderr(&o).matches("warning").count(), 1, "{}", stderr(&o));
}
