use std::collections::BTreeMap;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use super::distinguish::holdout_accuracy;
use super::{ConfigInvalid, ScenarioConfig, Step, World};
use crate::protocol::AuthPayload;
use crate::wire::{decode, Frame, Message};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Protocol {
    Aka,
    Handover,
}

fn payload_fields(p: &AuthPayload, out: &mut Vec<(&'static str, Vec<u8>)>) {
    out.extend([
        ("proof", p.proof.to_bytes()),
        ("commitment", p.commitment.to_bytes().to_vec()),
        ("enc_key", p.enc_key.as_bytes().to_vec()),
        ("verify_key", p.verify_key.as_bytes().to_vec()),
        ("escrow", p.escrow.to_bytes().to_vec()),
        ("escrow_proof", p.escrow_proof.to_bytes().to_vec()),
    ]);
}

/// The per-session random fields of a frame, as the eavesdropper sees them.
/// Broadcast `M1`s and aborts carry nothing user-specific and yield nothing;
/// timestamps are left out because they are meant to vary.
pub fn observable_fields(frame: &[u8]) -> Vec<(&'static str, Vec<u8>)> {
    let Ok(msg) = Frame::from_bytes(frame).and_then(|f| decode(&f.payload)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    match msg {
        Message::M2(m) => {
            payload_fields(&m.payload, &mut out);
            out.push(("ue_signature", m.signature.as_bytes().to_vec()));
        }
        Message::M3(m) => {
            payload_fields(&m.payload, &mut out);
            out.push(("gnb_signature", m.signature.as_bytes().to_vec()));
        }
        Message::M4(m) => out.push(("ciphertext", m.ciphertext)),
        Message::HoM2(m) => out.extend([
            ("proof", m.proof.to_bytes()),
            ("commitment", m.commitment.to_bytes().to_vec()),
            ("enc_key", m.enc_key.as_bytes().to_vec()),
            ("verify_key", m.verify_key.as_bytes().to_vec()),
            ("ue_signature", m.signature.as_bytes().to_vec()),
        ]),
        Message::HoM3(m) => out.push(("ciphertext", m.ciphertext)),
        Message::M1(_) | Message::HoM1(_) | Message::Abort => {}
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkabilityReport {
    pub protocol: Protocol,
    pub trials: usize,
    /// Trials in which the honest run completed.
    pub completed: usize,
    /// Field values seen in an earlier session (of either UE).
    pub repeated_fields: usize,
    /// `|correct − wrong| / trials` for the field-equality matcher, which
    /// guesses only when a field value repeats.
    pub matcher_advantage: f64,
    /// Held-out accuracy of the logistic classifier over field bytes.
    pub classifier_accuracy: f64,
    pub classifier_advantage: f64,
}

impl LinkabilityReport {
    /// Tolerated classifier advantage: 0.05, widened to three standard
    /// errors of a fair coin when the held-out half is too small for that.
    pub fn classifier_bound(&self) -> f64 {
        let test = (self.trials - self.trials / 2).max(1) as f64;
        (3.0 * 0.5 / test.sqrt()).max(0.05)
    }

    /// Every run completed, no field value repeated, and neither
    /// distinguisher beat its bound.
    pub fn held(&self) -> bool {
        self.completed == self.trials
            && self.repeated_fields == 0
            && self.matcher_advantage <= 0.05
            && self.classifier_advantage <= self.classifier_bound()
    }
}

/// Two UEs; each trial a fair coin picks one to run the protocol, and the
/// eavesdropper tries to tell which from the frames of that run.
///
/// The first half of the trials trains the classifier, the second half
/// tests it. The matcher keeps every field value it has seen with the UE it
/// came from.
pub fn experiment_linkability(
    config: &ScenarioConfig,
    protocol: Protocol,
    trials: usize,
) -> Result<LinkabilityReport, ConfigInvalid> {
    let mut cfg = config.clone();
    cfg.n_ues = 2;
    cfg.n_gnbs = cfg.n_gnbs.max(2);
    cfg.list_size = cfg.list_size.max(2);
    cfg.adversary = Default::default();
    cfg.steps = None;
    let mut w = World::new(cfg)?;
    let mut coin = ChaCha20Rng::seed_from_u64(config.seed ^ 0x6c69_6e6b);

    if protocol == Protocol::Handover {
        w.run_step(&Step::Aka { ue: 0, gnb: 0 });
        w.run_step(&Step::Aka { ue: 1, gnb: 0 });
    }

    let mut seen: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut repeated = 0usize;
    let (mut right, mut wrong) = (0i64, 0i64);
    let mut samples = Vec::with_capacity(trials);
    let mut completed = 0;
    for _ in 0..trials {
        let b = (coin.next_u32() & 1) as usize;
        let step = match protocol {
            Protocol::Aka => Step::Aka { ue: b, gnb: 0 },
            Protocol::Handover => Step::Handover { ue: b, gnb: 1 },
        };
        let run = w.run_step(&step).expect("protocol step");
        if w.transcript().run(run).accepted() {
            completed += 1;
        }
        let fields: Vec<(&'static str, Vec<u8>)> = w
            .transcript()
            .run_events(run)
            .flat_map(|e| observable_fields(&e.frame))
            .collect();

        let mut guess = None;
        for (_, v) in &fields {
            if let Some(&owner) = seen.get(v) {
                repeated += 1;
                guess.get_or_insert(owner);
            }
        }
        match guess {
            Some(g) if g == b => right += 1,
            Some(_) => wrong += 1,
            None => {}
        }
        // M2 and M3 share their payload within a session; only cross-session
        // repeats count, so record after checking.
        for (_, v) in &fields {
            seen.insert(v.clone(), b);
        }

        let bytes: Vec<u8> = fields.into_iter().flat_map(|(_, v)| v).collect();
        samples.push((bytes, b == 1));
    }

    let classifier_accuracy = holdout_accuracy(&samples);
    Ok(LinkabilityReport {
        protocol,
        trials,
        completed,
        repeated_fields: repeated,
        matcher_advantage: if trials == 0 {
            0.0
        } else {
            (right - wrong).unsigned_abs() as f64 / trials as f64
        },
        classifier_accuracy,
        classifier_advantage: (classifier_accuracy - 0.5).abs(),
    })
}
