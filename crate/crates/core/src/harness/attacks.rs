use rand_core::RngCore;
use serde::Serialize;

use super::{ConfigInvalid, NodeId, Outcome, ScenarioConfig, Step, Transcript, World};
use crate::primitives::{ch_randomness, SanSigSignature};
use crate::protocol::{Gnb, GnbCertificate, Mno, Timestamp, M1};
use crate::wire::{frame, Message, TAG_HO_M2, TAG_M1, TAG_M2, TAG_M3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Window {
    Inside,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayCase {
    pub message: &'static str,
    pub window: Window,
    pub outcome: Outcome,
}

impl ReplayCase {
    pub fn accepted(&self) -> bool {
        self.outcome.is_accept()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayVerdict {
    /// The runs whose frames were recorded completed normally.
    pub honest_ok: bool,
    pub cases: Vec<ReplayCase>,
    #[serde(skip)]
    pub transcript: Transcript,
}

impl ReplayVerdict {
    pub fn rejected(&self) -> usize {
        self.cases.iter().filter(|c| !c.accepted()).count()
    }

    pub fn held(&self) -> bool {
        self.honest_ok && self.rejected() == self.cases.len()
    }
}

fn attack_world(config: &ScenarioConfig, min_ues: usize) -> Result<World, ConfigInvalid> {
    let mut cfg = config.clone();
    cfg.n_ues = cfg.n_ues.max(min_ues);
    cfg.n_gnbs = cfg.n_gnbs.max(2);
    cfg.list_size = cfg.list_size.max(cfg.n_ues);
    cfg.adversary = Default::default();
    cfg.steps = None;
    World::new(cfg)
}

fn find_frame(w: &World, run: usize, tag: u8) -> Vec<u8> {
    w.transcript()
        .run_events(run)
        .find(|e| e.type_tag() == Some(tag))
        .map(|e| e.frame.clone())
        .expect("honest run carries the frame")
}

/// Delivers `frame` as the adversary and reports what the receiver did.
fn replay(
    w: &mut World,
    from: NodeId,
    to: NodeId,
    ue: usize,
    gnb: usize,
    frame: Vec<u8>,
) -> Outcome {
    let run = w.adversarial_run(ue, gnb);
    let ev = w.inject(from, to, run, frame);
    w.run_until_idle();
    w.transcript().events[ev].outcome
}

pub(crate) fn replay_world(
    config: &ScenarioConfig,
) -> Result<(World, ReplayVerdict), ConfigInvalid> {
    let mut w = attack_world(config, 2)?;
    let aka = w.run_step(&Step::Aka { ue: 0, gnb: 0 }).expect("run");
    let ho = w.run_step(&Step::Handover { ue: 0, gnb: 1 }).expect("run");
    let honest_ok = w.transcript().run(aka).accepted() && w.transcript().run(ho).accepted();

    let m1 = find_frame(&w, aka, TAG_M1);
    let m2 = find_frame(&w, aka, TAG_M2);
    let m3 = find_frame(&w, aka, TAG_M3);
    let ho_m2 = find_frame(&w, ho, TAG_HO_M2);

    let (ue, g0, g1) = (NodeId::Ue(0), NodeId::Gnb(0), NodeId::Gnb(1));
    let mut cases = Vec::new();
    let mut matrix = |w: &mut World, window: Window, m1_target: usize| {
        let c = [
            ("M1", g0, NodeId::Ue(m1_target), m1_target, 0, m1.clone()),
            ("M2", ue, g0, 0, 0, m2.clone()),
            ("M3", g0, NodeId::Cn, 0, 0, m3.clone()),
            ("HO-M2", ue, g1, 0, 1, ho_m2.clone()),
        ];
        for (message, from, to, u, g, f) in c {
            let outcome = replay(w, from, to, u, g, f);
            cases.push(ReplayCase {
                message,
                window,
                outcome,
            });
        }
    };
    matrix(&mut w, Window::Inside, 0);
    let skew = w.config().skew_ms;
    w.advance(skew + 1_000);
    // The stale M1 goes to a UE that has never seen it, so only freshness
    // can stop it.
    matrix(&mut w, Window::Outside, 1);

    let verdict = ReplayVerdict {
        honest_ok,
        cases,
        transcript: w.transcript().clone(),
    };
    Ok((w, verdict))
}

/// Records an honest AKA and handover, then replays `M1`, `M2`, `M3` and
/// `HO-M2` once inside the freshness window and once after it.
pub fn attack_replay(config: &ScenarioConfig) -> Result<ReplayVerdict, ConfigInvalid> {
    replay_world(config).map(|(_, v)| v)
}

#[derive(Clone, Debug, Serialize)]
pub struct FakeGnbVerdict {
    pub self_keyed_attempts: usize,
    pub self_keyed_accepts: usize,
    pub stale_attempts: usize,
    pub stale_accepts: usize,
    pub forgery_attempts: usize,
    pub forgery_accepts: usize,
    #[serde(skip)]
    pub transcript: Transcript,
}

impl FakeGnbVerdict {
    pub fn accepts(&self) -> usize {
        self.self_keyed_accepts + self.stale_accepts + self.forgery_accepts
    }
}

fn m1_frame(cert: GnbCertificate) -> Vec<u8> {
    frame(&Message::M1(M1 { certificate: cert }))
        .expect("encodable")
        .to_bytes()
}

fn injected_m1(w: &mut World, ue: usize, gnb: usize, frame: Vec<u8>) -> bool {
    replay(w, NodeId::Adversary, NodeId::Ue(ue), ue, gnb, frame).is_accept()
}

pub(crate) fn fake_gnb_world(
    config: &ScenarioConfig,
    forgeries: usize,
) -> Result<(World, FakeGnbVerdict), ConfigInvalid> {
    let mut w = attack_world(config, 1)?;
    let mut self_keyed = (0, 0);
    let mut stale = (0, 0);
    let mut forged = (0, 0);

    // A rogue operator with its own CN and sanitizer keys, claiming the
    // genuine cell identities.
    let mut rogue = Mno::new();
    rogue.setup_cn(&mut w.rng).expect("fresh");
    for g in 0..2 {
        let genuine = w.gnb(g).certificate().clone();
        let now = w.now();
        let p = rogue
            .register_gnb(
                genuine.gnb_id(),
                genuine.location(),
                genuine.expiry(),
                now,
                &mut w.rng,
            )
            .expect("rogue registration");
        let fake = Gnb::new(p, w.pconf.clone());
        let m1 = fake.make_m1(now, &mut w.rng).expect("valid rogue cert");
        self_keyed.0 += 1;
        self_keyed.1 += injected_m1(&mut w, 0, g, m1_frame(m1.certificate)) as usize;
    }
    // The genuine certificate re-stamped without the sanitizer trapdoor.
    let genuine = w.gnb(0).certificate().clone();
    let restamped = GnbCertificate::from_parts(
        genuine.location().to_vec(),
        genuine.expiry(),
        genuine.gnb_id().to_owned(),
        w.now(),
        genuine.signature().clone(),
    );
    self_keyed.0 += 1;
    self_keyed.1 += injected_m1(&mut w, 0, 0, m1_frame(restamped)) as usize;

    // Genuine broadcasts replayed after they went stale.
    let mut recorded = Vec::new();
    for _ in 0..3 {
        let now = w.now();
        let m1 = w.gnbs[0].make_m1(now, &mut w.rng).expect("valid cert");
        recorded.push(m1_frame(m1.certificate));
    }
    let skew = w.config().skew_ms;
    for (f, lag) in recorded.into_iter().zip([skew + 1, 3_600_000, 86_400_000]) {
        w.advance(lag);
        stale.0 += 1;
        stale.1 += injected_m1(&mut w, 0, 0, f) as usize;
    }

    // Fresh stamps with random signatures. Even attempts keep the CN's
    // signature and guess only the chameleon randomness; odd ones guess
    // everything.
    for i in 0..forgeries {
        let mut sig = genuine.signature().to_bytes();
        if i % 2 == 1 {
            w.rng.fill_bytes(&mut sig[..64]);
        }
        let r = ch_randomness(&mut w.rng).to_bytes();
        let n = sig.len();
        sig[n - 64..].copy_from_slice(&r);
        let sig = SanSigSignature::from_bytes(&sig).expect("well-formed");
        let cert = GnbCertificate::from_parts(
            genuine.location().to_vec(),
            genuine.expiry(),
            genuine.gnb_id().to_owned(),
            Timestamp(w.now().0),
            sig,
        );
        forged.0 += 1;
        forged.1 += injected_m1(&mut w, 0, 0, m1_frame(cert)) as usize;
        w.advance(1);
    }

    let verdict = FakeGnbVerdict {
        self_keyed_attempts: self_keyed.0,
        self_keyed_accepts: self_keyed.1,
        stale_attempts: stale.0,
        stale_accepts: stale.1,
        forgery_attempts: forged.0,
        forgery_accepts: forged.1,
        transcript: w.transcript().clone(),
    };
    Ok((w, verdict))
}

/// Fake base station attempts against a UE camping on a genuine cell: a
/// rogue operator's own certificates, a re-stamped genuine certificate,
/// stale replays, and `forgeries` random signatures.
pub fn attack_fake_gnb(
    config: &ScenarioConfig,
    forgeries: usize,
) -> Result<FakeGnbVerdict, ConfigInvalid> {
    fake_gnb_world(config, forgeries).map(|(_, v)| v)
}
