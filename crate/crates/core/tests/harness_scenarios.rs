use mvno_aka::harness::{
    attack_fake_gnb, attack_replay, run_scenario, suite, Disposition, NodeId, Outcome, RunKind,
    RunStatus, ScenarioConfig, Step, Window, World,
};
use mvno_aka::protocol::ProtocolError;
use mvno_aka::wire::{Container, TAG_ABORT};

fn cfg(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        seed,
        ..Default::default()
    }
}

#[test]
fn default_run_ends_with_aka_then_handover() {
    let t = run_scenario(&ScenarioConfig::default()).unwrap();
    assert_eq!(t.runs.len(), 2);
    assert_eq!(t.runs[0].kind, RunKind::Aka);
    assert_eq!(t.runs[1].kind, RunKind::Handover);
    assert!(t.runs.iter().all(|r| r.accepted()), "{t:#?}");
    assert_eq!(
        t.runs[0].checkpoints,
        ["ue:m1", "gnb:m2", "cn:m3", "gnb:m4", "ue:m4"]
    );
    assert_eq!(t.runs[1].checkpoints, ["ue:ho-m1", "gnb:ho-m2", "ue:ho-m3"]);
    let carriers: Vec<Container> = t.events.iter().filter_map(|e| e.container()).collect();
    assert_eq!(
        carriers,
        [
            Container::Sib1,
            Container::RrcSetupComplete,
            Container::InitialUeMessage,
            Container::AuthenticationRequest,
            Container::AuthenticationRequest,
            Container::Sib1,
            Container::RrcReestablishmentComplete,
            Container::DlInformationTransfer,
        ]
    );
}

#[test]
fn same_seed_same_bytes() {
    let c = ScenarioConfig {
        n_ues: 2,
        ..cfg(42)
    };
    let a = run_scenario(&c).unwrap().to_hex_dump();
    let b = run_scenario(&c).unwrap().to_hex_dump();
    assert_eq!(a, b);
    let other = run_scenario(&cfg(43)).unwrap().to_hex_dump();
    assert_ne!(a, other);
}

#[test]
fn sixty_four_ues_four_cells() {
    let c = ScenarioConfig {
        n_ues: 64,
        n_gnbs: 4,
        list_size: 64,
        ..cfg(5)
    };
    let t = run_scenario(&c).unwrap();
    assert_eq!(t.runs.len(), 128);
    assert!(t.runs.iter().all(|r| r.accepted()));
}

#[test]
fn bad_configs_are_refused() {
    for c in [
        ScenarioConfig { n_ues: 0, ..cfg(1) },
        ScenarioConfig {
            n_gnbs: 0,
            ..cfg(1)
        },
        ScenarioConfig {
            list_size: 0,
            ..cfg(1)
        },
        ScenarioConfig {
            list_size: 5000,
            ..cfg(1)
        },
        ScenarioConfig { n_ues: 9, ..cfg(1) },
        ScenarioConfig {
            skew_ms: 0,
            ..cfg(1)
        },
        ScenarioConfig {
            steps: Some(vec![Step::Aka { ue: 3, gnb: 0 }]),
            ..cfg(1)
        },
    ] {
        assert!(run_scenario(&c).is_err(), "{c:?}");
    }
}

#[test]
fn handover_never_touches_the_cn() {
    let c = ScenarioConfig {
        n_ues: 3,
        n_gnbs: 3,
        ..cfg(8)
    };
    let t = run_scenario(&c).unwrap();
    for r in t.runs.iter().filter(|r| r.kind == RunKind::Handover) {
        assert!(r.accepted());
        assert_eq!(
            t.run_events(r.id).filter(|e| e.touches(NodeId::Cn)).count(),
            0
        );
    }
}

#[test]
fn replay_matrix_rejects_everything() {
    let v = attack_replay(&cfg(3)).unwrap();
    assert!(v.honest_ok);
    assert_eq!(v.cases.len(), 8);
    for c in &v.cases {
        let want = match c.window {
            Window::Inside => ProtocolError::DuplicateMessage,
            Window::Outside => ProtocolError::StaleTimestamp,
        };
        assert_eq!(c.outcome, Outcome::Aborted(want), "{c:?}");
    }
    assert!(v.held());
}

#[test]
fn fake_base_stations_are_refused() {
    let v = attack_fake_gnb(&cfg(4), 200).unwrap();
    assert_eq!(v.self_keyed_attempts, 3);
    assert_eq!(v.stale_attempts, 3);
    assert_eq!(v.forgery_attempts, 200);
    assert_eq!(v.accepts(), 0);
    let causes: Vec<Outcome> = v
        .transcript
        .events
        .iter()
        .filter(|e| e.disposition == Disposition::Injected)
        .map(|e| e.outcome)
        .collect();
    assert!(causes[..3]
        .iter()
        .all(|o| *o == Outcome::Aborted(ProtocolError::BadCertificate)));
    assert!(causes[3..6]
        .iter()
        .all(|o| *o == Outcome::Aborted(ProtocolError::StaleTimestamp)));
}

#[test]
fn revoked_user_is_locked_out_both_ways() {
    let mut w = World::new(ScenarioConfig { n_ues: 2, ..cfg(6) }).unwrap();
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Aka { ue: 1, gnb: 0 },
        Step::Revoke { ue: 0 },
    ]);
    let before = w.transcript().runs.len();
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
    ]);
    let stale = w.pre_revocation_lists(0);
    w.freeze_lists(0, Some(stale));
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
    ]);
    w.freeze_lists(0, None);
    w.run_steps(&[
        Step::Aka { ue: 1, gnb: 1 },
        Step::Handover { ue: 1, gnb: 0 },
    ]);
    let t = w.transcript();
    let reasons: Vec<RunStatus> = t.runs[before..].iter().map(|r| r.status).collect();
    assert_eq!(
        reasons,
        [
            RunStatus::Failed {
                at: NodeId::Ue(0),
                reason: Some(ProtocolError::NotInList)
            },
            RunStatus::Failed {
                at: NodeId::Ue(0),
                reason: Some(ProtocolError::NotInList)
            },
            RunStatus::Failed {
                at: NodeId::Cn,
                reason: Some(ProtocolError::BadProof)
            },
            RunStatus::Failed {
                at: NodeId::Gnb(1),
                reason: Some(ProtocolError::BadProof)
            },
            RunStatus::Accepted,
            RunStatus::Accepted,
        ]
    );
}

#[test]
fn suite_covers_every_error_and_operation_without_leaks() {
    let entries = suite(11);
    let mut total = mvno_aka::harness::Transcript::default();
    for e in &entries {
        assert!(e.leaks.is_empty(), "{} leaks {:?}", e.name, e.leaks);
        total.absorb(&e.transcript);
    }
    assert!(
        total.uncovered_errors().is_empty(),
        "{:?}",
        total.uncovered_errors()
    );
    assert!(
        total.uncovered_ops().is_empty(),
        "{:?}",
        total.uncovered_ops()
    );

    // Every network-originated failure signal is the same bytes.
    let aborts: Vec<&[u8]> = total
        .events
        .iter()
        .filter(|e| e.from.is_network() && e.type_tag() == Some(TAG_ABORT))
        .map(|e| e.frame.as_slice())
        .collect();
    assert!(aborts.len() >= 5);
    assert!(aborts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn session_keys_reach_ue_and_gnb() {
    let c = ScenarioConfig {
        features: mvno_aka::harness::Features { session_keys: true },
        ..cfg(9)
    };
    let t = run_scenario(&c).unwrap();
    assert!(t.runs[0].checkpoints.contains(&"keys-agree"));
    let plain = run_scenario(&cfg(9)).unwrap();
    assert!(!plain.runs[0].checkpoints.contains(&"keys-agree"));
}
