use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvno-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn run_ho_reports_json_and_writes_a_transcript() {
    let dir = std::env::temp_dir().join(format!("mvno-sim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.hex");
    let out = sim(&[
        "run-ho",
        "--seed",
        "4",
        "--ues",
        "2",
        "--transcript-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["result"].as_array().unwrap().len(), 4);
    let dump = std::fs::read_to_string(&path).unwrap();
    assert!(dump.starts_with("#0 "));
    assert!(dump.contains("SIB1/M1"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_output_and_config_file() {
    let dir = std::env::temp_dir().join(format!("mvno-sim-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("sim.cfg");
    std::fs::write(
        &cfg,
        "# two users\nseed = 9\nues = 2\nfeatures = session-keys\n",
    )
    .unwrap();
    let out = sim(&[
        "revoke",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "run,kind,ue,gnb,status,reason");
    assert!(lines.iter().any(|l| l.ends_with("failed@ue-0,NotInList")));
    // A flag overrides the file.
    let out = sim(&["setup", "--config", cfg.to_str().unwrap(), "--ues", "3"]);
    assert_eq!(json(&out)["config"]["n_ues"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn attacks_hold() {
    for kind in ["replay", "fake-gnb"] {
        let out = sim(&["attack", "--type", kind, "--forgeries", "50"]);
        assert_eq!(out.status.code(), Some(0), "{kind}");
        assert_eq!(json(&out)["passed"], true);
    }
    let out = sim(&[
        "attack",
        "--type",
        "linkability",
        "--trials",
        "200",
        "--output",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("protocol,trials,"));
}

#[test]
fn bench_csv_header_is_pinned() {
    let out = sim(&["bench", "--iterations", "3", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("message,entity,mean_ms,p95_ms,bytes")
    );
    for m in ["M1", "M2", "M3", "M4"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{m},total,"))));
    }
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["run-aka", "--ues", "0"][..],
        &["run-aka", "--list-size", "100000"],
        &["run-aka", "--features", "warp-drive"],
        &["run-aka", "--config", "/nonexistent/sim.cfg"],
        &["attack", "--type", "telepathy"],
        &["no-such-command"],
    ] {
        assert_eq!(sim(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(sim(&["--help"]).status.code(), Some(0));
}
