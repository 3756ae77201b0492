use mvno_aka::harness::transport::{loopback_aka, recv, send};
use mvno_aka::harness::ScenarioConfig;
use mvno_aka::wire::Message;

#[test]
fn aka_over_loopback_tcp() {
    for session_keys in [false, true] {
        let mut c = ScenarioConfig {
            seed: 31,
            ..Default::default()
        };
        c.features.session_keys = session_keys;
        let uid = loopback_aka(&c).expect("aka completes over tcp");
        assert!(!uid.to_bytes().is_empty());
    }
}

#[test]
fn stream_of_frames_keeps_boundaries() {
    let mut buf = Vec::new();
    for _ in 0..3 {
        send(&mut buf, &Message::Abort).unwrap();
    }
    let mut r = buf.as_slice();
    for _ in 0..3 {
        assert_eq!(recv(&mut r).unwrap(), Message::Abort);
    }
    assert!(recv(&mut r).is_err());
}
