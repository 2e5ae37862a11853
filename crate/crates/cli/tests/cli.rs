use std::process::{Command, Output};

fn srpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srpolar"))
        .args(args)
        .env_remove("SRPOLAR_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_prints_census() {
    let out = srpolar(&["analyze", "--n", "7", "--k", "64", "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let census = &v["census"];
    assert_eq!(
        census["general_count"].as_u64().unwrap() + 1,
        census["sr_count"].as_u64().unwrap()
    );
    assert_eq!(v["latency"]["sc"]["time_steps"], 254);
    assert!(v["latency"]["srfsc"]["time_steps"].as_u64().unwrap() < 254);
}

#[test]
fn analyze_writes_breakdown_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nodes.csv");
    let out = srpolar(&[
        "analyze",
        "--n",
        "5",
        "--k",
        "16",
        "--breakdown",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,index,kind,steps,cycles"));
    let steps: u64 = lines
        .map(|l| l.split(',').nth(3).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(stdout_json(&out)["latency"]["srfsc"]["time_steps"], steps);
}

#[test]
fn missing_epsilon_is_a_usage_error() {
    let out = srpolar(&[
        "simulate",
        "--n",
        "7",
        "--k",
        "64",
        "--decoder",
        "ta",
        "--ebno",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--epsilon"));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &[
            "simulate", "--n", "7", "--k", "64", "--ebno", "1", "--bogus",
        ],
        &["analyze", "--code", "/nonexistent/frozen.json"],
        &["analyze", "--code", "/nonexistent/frozen.json", "--n", "7"],
        &["analyze", "--n", "7"],
        &["simulate", "--n", "7", "--k", "64", "--ebno", "3:1:1"],
        &[
            "simulate",
            "--n",
            "7",
            "--k",
            "64",
            "--decoder",
            "sc",
            "--epsilon",
            "0.9",
            "--ebno",
            "1",
        ],
        &[
            "decode",
            "--n",
            "3",
            "--k",
            "4",
            "--llr",
            "/nonexistent/llr.txt",
        ],
    ];
    for args in cases {
        assert_eq!(srpolar(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn thresholds_reproduce_constants() {
    // sigma at Eb/N0 = 2 dB and rate 1/2.
    let sigma = (10f64.powf(-0.2)).sqrt().to_string();
    let out = srpolar(&[
        "thresholds",
        "--epsilon",
        "0.9",
        "--n",
        "10",
        "--sigma",
        &sigma,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["c"].as_f64().unwrap() - 3.8).abs() < 1e-9);
    assert!((v["m_bound"].as_f64().unwrap() - 9.3891).abs() < 1e-3);
    assert_eq!(v["eligible_per_level"].as_array().unwrap().len(), 11);
}

#[test]
fn infeasible_thresholds_fail() {
    let out = srpolar(&[
        "thresholds",
        "--epsilon",
        "0.999",
        "--c",
        "3.0",
        "--n",
        "10",
        "--sigma",
        "0.8",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn version_and_help() {
    let out = srpolar(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("srpolar "));
    let out = srpolar(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["construct", "analyze", "thresholds", "decode", "simulate"] {
        assert!(text.contains(sub), "{sub}");
    }
}

#[test]
fn construct_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.json");
    let p = path.to_str().unwrap();
    let out = srpolar(&["construct", "--n", "6", "--k", "32", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["N"], 64);
    assert_eq!(v["frozen"].as_array().unwrap().len(), 32);

    let builtin = stdout_json(&srpolar(&["analyze", "--n", "6", "--k", "32"]));
    let from_file = stdout_json(&srpolar(&["analyze", "--code", p]));
    assert_eq!(builtin["census"], from_file["census"]);
    assert_eq!(builtin["latency"], from_file["latency"]);
}

#[test]
fn decode_recovers_a_noiseless_frame() {
    // All-zero codeword, strong positive LLRs; half as hex bit patterns.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("llr.txt");
    let tokens: Vec<String> = (0..16)
        .map(|t| {
            if t % 2 == 0 {
                "6.0".to_string()
            } else {
                format!("0x{:016x}", 6.0f64.to_bits())
            }
        })
        .collect();
    std::fs::write(&path, tokens.join(" ")).unwrap();
    let p = path.to_str().unwrap();
    for extra in [
        &["--decoder", "sc"][..],
        &["--decoder", "srfsc"],
        &["--decoder", "ta", "--epsilon", "0.9", "--ebno", "3"],
    ] {
        let mut args = vec!["decode", "--n", "4", "--k", "8", "--llr", p];
        args.extend_from_slice(extra);
        let out = srpolar(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = stdout_json(&out);
        assert_eq!(v["u_hat"], "0000");
        assert_eq!(v["payload"], "00");
    }
    let out = srpolar(&["decode", "--n", "3", "--k", "4", "--llr", p]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_reports_and_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_srpolar"))
            .args([
                "simulate",
                "--n",
                "6",
                "--k",
                "32",
                "--crc",
                "6",
                "--decoder",
                "multistage",
                "--epsilon",
                "0.9",
                "--ebno",
                "1:1:3",
                "--seed",
                "42",
                "--max-frames",
                "3000",
                "--out",
                path.to_str().unwrap(),
            ])
            .env("SRPOLAR_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read_to_string(path).unwrap()
    };
    let one = run("1", "a.csv");
    assert_eq!(one, run("4", "b.csv"));
    let mut lines = one.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("ebno_db,frames,frame_errors,bler"));
    assert_eq!(lines.count(), 3);

    let json = run("2", "c.json");
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[0]["seed"], 42);
}

#[test]
fn bad_worker_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_srpolar"))
        .args(["simulate", "--n", "5", "--k", "16", "--ebno", "1"])
        .env("SRPOLAR_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
