use rand_core::RngCore;

use super::attacks::{fake_gnb_world, replay_world};
use super::{
    Action, AdversaryScript, ByteEdit, ConfigInvalid, Features, Matcher, NodeId, ScenarioConfig,
    Step, Transcript, World,
};
use crate::primitives::pke_encrypt;
use crate::protocol::{HoM3, Mno};
use crate::wire::{
    decode, frame, Frame, Message, TAG_HO_M1, TAG_HO_M2, TAG_HO_M3, TAG_M1, TAG_M2, TAG_M3, TAG_M4,
};

/// Setup, registrations, exchange, then the configured steps. Entity
/// failures are recorded in the transcript and never stop the run.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Transcript, ConfigInvalid> {
    let mut w = World::new(config.clone())?;
    w.run_steps(&config.steps());
    Ok(w.into_transcript())
}

/// On-wire occurrences of any UE's identifying bytes, as
/// `(event index, ue index)`.
pub fn scan_for_identities(w: &World) -> Vec<(usize, usize)> {
    let material: Vec<Vec<Vec<u8>>> = (0..w.n_ues()).map(|i| w.identity_material(i)).collect();
    let mut hits = Vec::new();
    for e in &w.transcript().events {
        for (ue, items) in material.iter().enumerate() {
            let leaked = items
                .iter()
                .any(|m| !m.is_empty() && e.frame.windows(m.len()).any(|win| win == m.as_slice()));
            if leaked {
                hits.push((e.index, ue));
            }
        }
    }
    hits
}

#[derive(Debug)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub transcript: Transcript,
    pub leaks: Vec<(usize, usize)>,
}

fn entry(name: &'static str, w: World) -> SuiteEntry {
    SuiteEntry {
        name,
        leaks: scan_for_identities(&w),
        transcript: w.into_transcript(),
    }
}

fn honest(seed: u64, session_keys: bool) -> World {
    World::new(ScenarioConfig {
        seed,
        n_ues: 2,
        features: Features { session_keys },
        ..Default::default()
    })
    .map(run_all)
    .expect("valid")
}

fn edit(offset: i64) -> Action {
    Action::Modify(vec![ByteEdit { offset, xor: 0x01 }])
}

/// Bit flips and misrouting on one AKA/handover pair per step.
fn tamper(seed: u64) -> World {
    let (ue, g0, g1) = (NodeId::Ue(0), NodeId::Gnb(0), NodeId::Gnb(1));
    // Offsets are into the frame: container, tag, then the message. Byte 4
    // is the first location byte of a certificate; the last byte of M2 and
    // M3 is in a signature, of HO-M2 in its timestamp.
    let script = AdversaryScript::passive()
        .rule(Matcher::any().tag(TAG_M1).step(0), edit(4))
        .rule(Matcher::any().tag(TAG_M2).step(1), edit(-1))
        .rule(Matcher::any().tag(TAG_M3).step(2), edit(-1))
        .rule(Matcher::any().from(g0).to(ue).tag(TAG_M4).step(3), edit(10))
        .rule(Matcher::any().tag(TAG_M3).step(4), Action::Redirect(g1))
        .rule(
            Matcher::any().tag(TAG_M2).step(5),
            Action::Inject(vec![0x02, 0x02, 0xFF]),
        )
        .rule(Matcher::any().tag(TAG_HO_M3).step(7), edit(10))
        .rule(Matcher::any().tag(TAG_HO_M2).step(8), edit(-1))
        .rule(Matcher::any().tag(TAG_HO_M2).step(9), Action::Drop)
        .rule(
            Matcher::any().tag(TAG_HO_M1).step(10),
            Action::Redirect(NodeId::Cn),
        );
    let mut steps = vec![Step::Aka { ue: 0, gnb: 0 }; 7];
    steps.extend(vec![Step::Handover { ue: 0, gnb: 1 }; 5]);
    World::new(ScenarioConfig {
        seed,
        adversary: script,
        steps: Some(steps),
        ..Default::default()
    })
    .map(run_all)
    .expect("valid")
}

fn run_all(mut w: World) -> World {
    w.run_steps(&w.config().steps());
    w
}

/// Revocation: both users authenticate and hand over, user 0 is revoked,
/// then user 0 retries (once honestly, once clinging to pre-revocation
/// lists) while user 1 carries on.
fn revocation(seed: u64) -> World {
    let mut w = World::new(ScenarioConfig {
        seed,
        n_ues: 2,
        ..Default::default()
    })
    .expect("valid");
    w.run_steps(&[
        Step::Aka { ue: 0, gnb: 0 },
        Step::Aka { ue: 1, gnb: 1 },
        Step::Handover { ue: 0, gnb: 1 },
        Step::Handover { ue: 1, gnb: 0 },
        Step::Revoke { ue: 0 },
        Step::Aka { ue: 0, gnb: 0 },
        Step::Handover { ue: 0, gnb: 1 },
    ]);
    revoked_with_stale_lists(&mut w, 0);
    w.run_steps(&[
        Step::Aka { ue: 1, gnb: 0 },
        Step::Handover { ue: 1, gnb: 1 },
    ]);
    w
}

/// A revoked UE that ignores list updates and proves against the lists it
/// held before revocation.
pub(crate) fn revoked_with_stale_lists(w: &mut World, ue: usize) {
    let (aka, ho) = w.pre_revocation_lists(ue);
    w.freeze_lists(ue, Some((aka, ho)));
    w.run_steps(&[Step::Aka { ue, gnb: 0 }, Step::Handover { ue, gnb: 1 }]);
    w.freeze_lists(ue, None);
}

/// Drives the error paths the other scenarios do not reach: setup misuse,
/// handover without a UID, out-of-session and forged messages, list
/// regressions, double revocation and certificate expiry.
fn misuse(seed: u64) -> World {
    let mut w = World::new(ScenarioConfig {
        seed,
        n_ues: 2,
        ..Default::default()
    })
    .expect("valid");
    let now = w.now();

    let r = w.mno.setup_cn(&mut w.rng).map(drop);
    w.record_note("mno:setup_cn", r);
    let r = w
        .mno
        .register_gnb("gnb-0", b"cell-0", now.plus_ms(60_000), now, &mut w.rng)
        .map(drop);
    w.record_note("mno:register_gnb", r);
    let r = w
        .mno
        .register_gnb("gnb-x", b"cell-x", now, now, &mut w.rng)
        .map(drop);
    w.record_note("mno:register_gnb", r);
    let r = Mno::new()
        .register_gnb("gnb-y", b"cell-y", now.plus_ms(1), now, &mut w.rng)
        .map(drop);
    w.record_note("mno:register_gnb", r);
    let r = w.mvno.register_user(b"user-0", &mut w.rng).map(drop);
    w.record_note("mvno:register_user", r);
    let r = w.mvno.revoke_user(b"nobody").map(drop);
    w.record_note("mvno:revoke_user", r);

    // Handover before any AKA: no UID yet.
    w.run_step(&Step::Handover { ue: 0, gnb: 1 });

    let old_ho = w.cn.ho_params().expect("installed");
    w.run_step(&Step::Aka { ue: 0, gnb: 0 });
    let aka_run = w.transcript().runs.len() - 1;
    w.run_step(&Step::Aka { ue: 1, gnb: 1 });
    w.run_step(&Step::Handover { ue: 0, gnb: 1 });
    let r = w.gnbs[0].install_ho(old_ho);
    w.record_note("gnb:install_ho", r);

    // M3 from a node the CN does not know; M4 to a UE with no open session.
    let m3 = frame_of(&w, aka_run, TAG_M3);
    let m4 = frame_of(&w, aka_run, TAG_M4);
    let run = w.adversarial_run(0, 0);
    w.inject(NodeId::Adversary, NodeId::Cn, run, m3);
    w.inject(NodeId::Adversary, NodeId::Ue(0), run, m4);
    w.run_until_idle();

    // Forged HO-M3: the UE's encryption key is public in HO-M2, so anyone
    // can encrypt to it, but not produce the gNB's acknowledgement.
    let step = w.step_index();
    w.set_script(
        AdversaryScript::passive().rule(Matcher::any().tag(TAG_HO_M3).step(step), Action::Drop),
    );
    let ho_run = w.run_step(&Step::Handover { ue: 1, gnb: 0 }).expect("run");
    w.set_script(AdversaryScript::passive());
    let ho_m2 = frame_of(&w, ho_run, TAG_HO_M2);
    let Ok(Message::HoM2(m2)) = Frame::from_bytes(&ho_m2).and_then(|f| decode(&f.payload)) else {
        unreachable!("recorded HO-M2 decodes")
    };
    let mut fake = vec![0u8; 128];
    w.rng.fill_bytes(&mut fake);
    let ct = pke_encrypt(&m2.enc_key, &fake, &mut w.rng).expect("valid key");
    let forged = frame(&Message::HoM3(HoM3 { ciphertext: ct }))
        .expect("encodable")
        .to_bytes();
    w.inject(NodeId::Adversary, NodeId::Ue(1), ho_run, forged);
    w.run_until_idle();

    // The same revocation notice twice.
    let notice = w.mvno.revoke_user(b"user-1");
    w.record_note(
        "mvno:revoke_user",
        notice.as_ref().map(drop).map_err(|e| *e),
    );
    if let Ok(n) = notice {
        let r = w.cn.apply_revocation(&n);
        w.record_note("cn:apply_revocation", r);
        let r = w.cn.apply_revocation(&n);
        w.record_note("cn:apply_revocation", r);
    }

    // A year and a day later the certificates have lapsed.
    w.advance(366 * 86_400_000);
    w.run_step(&Step::Aka { ue: 0, gnb: 0 });
    w
}

fn frame_of(w: &World, run: usize, tag: u8) -> Vec<u8> {
    w.transcript()
        .run_events(run)
        .find(|e| e.type_tag() == Some(tag))
        .map(|e| e.frame.clone())
        .expect("frame recorded")
}

/// Every canned scenario: honest runs (with and without session keys),
/// tampering, revocation, replay, fake base stations and API misuse.
pub fn suite(seed: u64) -> Vec<SuiteEntry> {
    let cfg = ScenarioConfig {
        seed,
        ..Default::default()
    };
    let (replay, _) = replay_world(&cfg).expect("valid");
    let (fake, _) = fake_gnb_world(&cfg, 50).expect("valid");
    vec![
        entry("honest", honest(seed, false)),
        entry("honest-session-keys", honest(seed, true)),
        entry("tamper", tamper(seed)),
        entry("revocation", revocation(seed)),
        entry("replay", replay),
        entry("fake-gnb", fake),
        entry("misuse", misuse(seed)),
    ]
}
