//! Runs every example binary that `cargo test` built alongside this test.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [(&str, &str); 10] = [
    ("commitment_and_tags", "wrong opens  false"),
    ("sanitizable_certificate", "moved cell verifies: false"),
    ("membership_proof", "simulated proof verifies: true"),
    ("initial_authentication", "session keys agree: true"),
    ("handover", "CN messages 0"),
    ("revocation", "reason: Some(BadProof)"),
    ("adversary_attacks", "fake base station: 0 accepted"),
    ("message_sizes", "\"msg\":\"HO-M3\""),
    ("bench_report", "message,entity,mean_ms,p95_ms,bytes"),
    ("tcp_loopback", "UID record over TCP"),
];

fn examples_dir() -> PathBuf {
    // target/<profile>/deps/examples_run-<hash> -> target/<profile>/examples
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn every_example_runs() {
    let dir = examples_dir();
    for (name, expect) in EXAMPLES {
        let path = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        assert!(path.exists(), "{} not built", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(
            text.contains(expect),
            "{name} output lacks {expect:?}:\n{text}"
        );
    }
}

#[test]
fn no_example_is_left_out() {
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut found: Vec<String> = std::fs::read_dir(src)
        .unwrap()
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(str::to_owned))
        .collect();
    found.sort();
    let mut listed: Vec<String> = EXAMPLES.iter().map(|(n, _)| n.to_string()).collect();
    listed.sort();
    assert_eq!(found, listed);
}
