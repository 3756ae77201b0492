use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use super::adversary::apply_edits;
use super::{
    Action, AdversaryScript, ConfigInvalid, Disposition, Event, NodeId, Note, Outcome, RunKind,
    RunRecord, RunStatus, ScenarioConfig, Step, Transcript,
};
use crate::protocol::{
    exchange_params, sync_handover_list, Cn, Gnb, Mno, Mvno, ProtocolConfig, ProtocolError,
    Timestamp, Ue,
};
use crate::wire::{frame, unframe, Frame, Message};
use crate::zk::AuthorizedList;

/// Logical time at which every scenario starts (ms since the epoch).
pub const T0: u64 = 1_750_000_000_000;
/// One network hop.
pub const HOP_MS: u64 = 5;
const STEP_GAP_MS: u64 = 100;
const CERT_LIFETIME_MS: u64 = 365 * 86_400_000;

#[derive(PartialEq, Eq)]
struct Queued {
    at: u64,
    seq: u64,
    event: usize,
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; earliest (at, seq) first.
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The simulated deployment: one MNO (CN plus gNBs), one MVNO and its UEs,
/// joined by an in-process network the adversary script sits on.
///
/// Entities read time from the scheduler's logical clock. Every frame goes
/// through the script on send and is delivered `HOP_MS` later in
/// `(time, sequence)` order, so a given config always yields the same
/// transcript.
pub struct World {
    pub(crate) config: ScenarioConfig,
    pub(crate) pconf: ProtocolConfig,
    pub(crate) rng: ChaCha20Rng,
    now: u64,
    step: usize,
    pub(crate) mno: Mno,
    pub(crate) mvno: Mvno,
    pub(crate) cn: Cn,
    pub(crate) gnbs: Vec<Gnb>,
    pub(crate) ues: Vec<Ue>,
    names: Vec<Vec<u8>>,
    queue: BinaryHeap<Queued>,
    seq: u64,
    pub(crate) transcript: Transcript,
    script: AdversaryScript,
    gnb_keys: BTreeMap<usize, [u8; 32]>,
    /// Lists each revoked UE held just before its revocation.
    pre_revocation: BTreeMap<usize, (AuthorizedList, AuthorizedList)>,
    /// UEs that ignore list updates and keep these lists instead.
    frozen: BTreeMap<usize, (AuthorizedList, AuthorizedList)>,
}

impl std::fmt::Debug for World {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("World")
            .field("now", &self.now)
            .field("step", &self.step)
            .field("ues", &self.ues.len())
            .field("gnbs", &self.gnbs.len())
            .finish_non_exhaustive()
    }
}

impl World {
    /// Setup, registrations and the parameter exchange. Both authorized
    /// lists are padded with decoys to `list_size`: extra MVNO subscribers on
    /// the AKA side, UIDs issued outside any run on the handover side.
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigInvalid> {
        config.validate()?;
        let pconf = config.protocol_config();
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let mut transcript = Transcript::default();
        let t0 = Timestamp(T0);

        let mut mno = Mno::new();
        let keys = mno.setup_cn(&mut rng).expect("fresh MNO");
        transcript.count_op("mno:setup_cn");
        let mut cn = Cn::new(keys, pconf.clone());
        let mut gnbs = Vec::with_capacity(config.n_gnbs);
        for i in 0..config.n_gnbs {
            let p = mno
                .register_gnb(
                    &format!("gnb-{i}"),
                    format!("cell-{i}").as_bytes(),
                    t0.plus_ms(CERT_LIFETIME_MS),
                    t0,
                    &mut rng,
                )
                .expect("distinct ids");
            transcript.count_op("mno:register_gnb");
            gnbs.push(Gnb::new(p, pconf.clone()));
        }
        let mut mvno = Mvno::setup(&[b"mvno-sim/".as_slice(), &config.seed.to_be_bytes()].concat());
        transcript.count_op("mvno:setup");
        exchange_params(&mut mvno, &mno, &mut cn).expect("first exchange");
        transcript.count_op("exchange_params");

        let mut names = Vec::with_capacity(config.n_ues);
        let mut creds = Vec::with_capacity(config.n_ues);
        for i in 0..config.n_ues {
            let name = format!("user-{i}").into_bytes();
            creds.push(mvno.register_user(&name, &mut rng).expect("distinct names"));
            transcript.count_op("mvno:register_user");
            names.push(name);
        }
        let decoys = config.list_size - config.n_ues;
        for i in 0..decoys {
            mvno.register_user(format!("decoy-{i}").as_bytes(), &mut rng)
                .expect("distinct names");
            transcript.count_op("mvno:register_user");
        }
        cn.push_aka_list(mvno.aka_list().clone())
            .expect("params installed");
        transcript.count_op("cn:push_aka_list");
        for _ in 0..decoys {
            cn.issue_uid(t0, &mut rng).expect("list has room");
            transcript.count_op("cn:issue_uid");
        }
        for g in &mut gnbs {
            sync_handover_list(&cn, g).expect("params installed");
            transcript.count_op("sync_handover_list");
        }
        let ues = creds
            .into_iter()
            .map(|c| Ue::new(c, pconf.clone()))
            .collect();

        Ok(Self {
            script: config.adversary.clone(),
            config,
            pconf,
            rng,
            now: T0,
            step: 0,
            mno,
            mvno,
            cn,
            gnbs,
            ues,
            names,
            queue: BinaryHeap::new(),
            seq: 0,
            transcript,
            gnb_keys: BTreeMap::new(),
            pre_revocation: BTreeMap::new(),
            frozen: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn now(&self) -> Timestamp {
        Timestamp(self.now)
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    /// Hands the configured entities out, for running them elsewhere.
    pub(crate) fn into_entities(mut self) -> (Cn, Vec<Gnb>, Vec<Ue>) {
        for i in 0..self.ues.len() {
            self.refresh_ue(i);
        }
        (self.cn, self.gnbs, self.ues)
    }

    pub fn cn(&self) -> &Cn {
        &self.cn
    }

    pub fn mvno(&self) -> &Mvno {
        &self.mvno
    }

    pub fn mno(&self) -> &Mno {
        &self.mno
    }

    pub fn gnb(&self, i: usize) -> &Gnb {
        &self.gnbs[i]
    }

    pub fn ue(&self, i: usize) -> &Ue {
        &self.ues[i]
    }

    pub fn n_ues(&self) -> usize {
        self.ues.len()
    }

    pub fn n_gnbs(&self) -> usize {
        self.gnbs.len()
    }

    /// Replaces the interposition rules from now on.
    pub fn set_script(&mut self, script: AdversaryScript) {
        self.script = script;
    }

    /// Byte strings that identify UE `i` and must never appear on the wire:
    /// its real name, its pseudonym (both byte orders), the pseudonym's tag,
    /// and the UID and UID tag once it has one.
    pub fn identity_material(&self, i: usize) -> Vec<Vec<u8>> {
        let ue = &self.ues[i];
        let pid = ue.pid_bytes();
        let mut pid_le = pid;
        pid_le.reverse();
        let mut out = vec![
            self.names[i].clone(),
            pid.to_vec(),
            pid_le.to_vec(),
            ue.pid_tag().as_bytes().to_vec(),
        ];
        if let Some(r) = ue.uid() {
            out.push(r.uid.to_vec());
            out.push(r.tag().as_bytes().to_vec());
        }
        out
    }

    /// Moves the logical clock forward.
    pub fn advance(&mut self, ms: u64) {
        self.now += ms;
    }

    /// Runs one scripted step to quiescence.
    pub fn run_step(&mut self, step: &Step) -> Option<usize> {
        self.now += STEP_GAP_MS;
        let run = match *step {
            Step::Aka { ue, gnb } => Some(self.start_aka(ue, gnb)),
            Step::Handover { ue, gnb } => Some(self.start_handover(ue, gnb)),
            Step::Revoke { ue } => {
                self.revoke(ue);
                None
            }
            Step::Advance { ms } => {
                self.advance(ms);
                None
            }
        };
        self.run_until_idle();
        self.step += 1;
        run
    }

    pub fn run_steps(&mut self, steps: &[Step]) {
        for s in steps {
            self.run_step(s);
        }
    }

    /// Hands UE `i` the currently published lists. Lists are public, so this
    /// models an out-of-band directory fetch.
    pub fn refresh_ue(&mut self, i: usize) {
        let (aka, ho) = match self.frozen.get(&i) {
            Some((a, h)) => (a.clone(), h.clone()),
            None => (self.mvno.aka_list().clone(), self.cn.ho_list().clone()),
        };
        self.ues[i].update_aka_list(aka);
        self.ues[i].update_ho_list(ho);
    }

    /// Makes UE `i` ignore published list updates and use `lists` (AKA,
    /// handover) instead, or go back to normal with `None`.
    pub fn freeze_lists(&mut self, i: usize, lists: Option<(AuthorizedList, AuthorizedList)>) {
        match lists {
            Some(l) => self.frozen.insert(i, l),
            None => self.frozen.remove(&i),
        };
    }

    /// The published lists as they stood just before UE `i` was revoked,
    /// or the current ones if it never was.
    pub fn pre_revocation_lists(&self, i: usize) -> (AuthorizedList, AuthorizedList) {
        self.pre_revocation
            .get(&i)
            .cloned()
            .unwrap_or_else(|| (self.mvno.aka_list().clone(), self.cn.ho_list().clone()))
    }

    fn sync_gnbs(&mut self) {
        for g in &mut self.gnbs {
            let r = sync_handover_list(&self.cn, g);
            match r {
                Ok(()) => self.transcript.count_op("sync_handover_list"),
                Err(e) => self.transcript.count_error(e),
            }
        }
    }

    pub(crate) fn new_run(&mut self, kind: RunKind, ue: usize, gnb: usize) -> usize {
        let id = self.transcript.runs.len();
        self.transcript.runs.push(RunRecord {
            id,
            kind,
            ue,
            gnb,
            step: self.step,
            status: RunStatus::Pending,
            checkpoints: Vec::new(),
        });
        id
    }

    /// A run id for frames the adversary sends on its own.
    pub fn adversarial_run(&mut self, ue: usize, gnb: usize) -> usize {
        self.new_run(RunKind::Adversarial, ue, gnb)
    }

    fn start_aka(&mut self, ue: usize, gnb: usize) -> usize {
        self.refresh_ue(ue);
        let run = self.new_run(RunKind::Aka, ue, gnb);
        match self.gnbs[gnb].make_m1(self.now(), &mut self.rng) {
            Ok(m1) => {
                self.transcript.count_op("gnb:make_m1");
                self.send(NodeId::Gnb(gnb), NodeId::Ue(ue), run, &Message::M1(m1));
            }
            Err(e) => self.fail(run, NodeId::Gnb(gnb), Some(e)),
        }
        run
    }

    fn start_handover(&mut self, ue: usize, gnb: usize) -> usize {
        self.sync_gnbs();
        self.refresh_ue(ue);
        let run = self.new_run(RunKind::Handover, ue, gnb);
        match self.gnbs[gnb].make_m1(self.now(), &mut self.rng) {
            Ok(m1) => {
                self.transcript.count_op("gnb:make_m1");
                self.send(NodeId::Gnb(gnb), NodeId::Ue(ue), run, &Message::HoM1(m1));
            }
            Err(e) => self.fail(run, NodeId::Gnb(gnb), Some(e)),
        }
        run
    }

    fn note(&mut self, op: &'static str, result: Result<(), ProtocolError>) {
        match result {
            Ok(()) => self.transcript.count_op(op),
            Err(e) => self.transcript.count_error(e),
        }
        self.transcript.notes.push(Note {
            step: self.step,
            op,
            result,
        });
    }

    /// MVNO revokes UE `i`; the CN applies the notice and pushes the shrunken
    /// handover list to every gNB.
    fn revoke(&mut self, i: usize) {
        let lists = (self.mvno.aka_list().clone(), self.cn.ho_list().clone());
        self.pre_revocation.entry(i).or_insert(lists);
        let notice = match self.mvno.revoke_user(&self.names[i]) {
            Ok(n) => {
                self.note("mvno:revoke_user", Ok(()));
                n
            }
            Err(e) => return self.note("mvno:revoke_user", Err(e)),
        };
        let r = self.cn.apply_revocation(&notice);
        self.note("cn:apply_revocation", r);
        self.sync_gnbs();
    }

    pub(crate) fn record_note(&mut self, op: &'static str, result: Result<(), ProtocolError>) {
        self.note(op, result);
    }

    fn send(&mut self, from: NodeId, to: NodeId, run: usize, msg: &Message) {
        let bytes = frame(msg)
            .expect("entities build encodable messages")
            .to_bytes();
        self.route(from, to, run, bytes);
    }

    /// Passes a frame through the adversary script and queues the result.
    fn route(&mut self, from: NodeId, to: NodeId, run: usize, mut bytes: Vec<u8>) {
        let tag = bytes.get(1).copied();
        let action = self.script.decide(from, to, tag, self.step).clone();
        let (to, disposition) = match action {
            Action::Deliver => (to, Disposition::Delivered),
            Action::Drop => {
                self.push(from, to, run, bytes, Disposition::Dropped, false);
                return;
            }
            Action::Modify(edits) => {
                apply_edits(&mut bytes, &edits);
                (to, Disposition::Modified)
            }
            Action::Replay(i) => match self.transcript.events.get(i) {
                Some(e) => {
                    bytes = e.frame.clone();
                    (to, Disposition::Replayed(i))
                }
                None => (to, Disposition::Delivered),
            },
            Action::Inject(raw) => {
                bytes = raw;
                (to, Disposition::Injected)
            }
            Action::Redirect(n) => (n, Disposition::Redirected(n)),
        };
        self.push(from, to, run, bytes, disposition, true);
    }

    fn push(
        &mut self,
        from: NodeId,
        to: NodeId,
        run: usize,
        frame: Vec<u8>,
        disposition: Disposition,
        deliver: bool,
    ) -> usize {
        let at = self.now + HOP_MS;
        let event = self.transcript.push_event(Event {
            index: 0,
            step: self.step,
            time: at,
            run,
            from,
            to,
            frame,
            disposition,
            outcome: Outcome::Pending,
        });
        if deliver {
            self.seq += 1;
            self.queue.push(Queued {
                at,
                seq: self.seq,
                event,
            });
        }
        event
    }

    /// Adversary-originated frame, bypassing the script. Returns the event
    /// index; its outcome is filled in once `run_until_idle` delivers it.
    pub fn inject(&mut self, from: NodeId, to: NodeId, run: usize, frame: Vec<u8>) -> usize {
        self.push(from, to, run, frame, Disposition::Injected, true)
    }

    /// Delivers queued frames, and whatever they trigger, until the network
    /// is quiet.
    pub fn run_until_idle(&mut self) {
        while let Some(q) = self.queue.pop() {
            self.now = self.now.max(q.at);
            self.deliver(q.event);
        }
    }

    fn fail(&mut self, run: usize, at: NodeId, reason: Option<ProtocolError>) {
        if let Some(e) = reason {
            self.transcript.count_error(e);
        }
        let r = &mut self.transcript.runs[run];
        if r.status == RunStatus::Pending {
            r.status = RunStatus::Failed { at, reason };
        }
    }

    fn set_outcome(&mut self, ev: usize, outcome: Outcome) {
        self.transcript.events[ev].outcome = outcome;
    }

    fn accept(&mut self, ev: usize, checkpoint: &'static str) {
        self.set_outcome(ev, Outcome::Accepted(checkpoint));
        let run = self.transcript.events[ev].run;
        self.transcript.runs[run].checkpoints.push(checkpoint);
    }

    fn abort(&mut self, ev: usize, at: NodeId, e: ProtocolError) {
        self.set_outcome(ev, Outcome::Aborted(e));
        let run = self.transcript.events[ev].run;
        self.fail(run, at, Some(e));
    }

    /// Network-side refusal: one opaque abort back to whoever sent the frame.
    fn reject(&mut self, ev: usize, at: NodeId, e: ProtocolError) {
        self.abort(ev, at, e);
        let Event { from, run, .. } = self.transcript.events[ev];
        self.send(at, from, run, &Message::Abort);
    }

    fn count(&mut self, op: &'static str) {
        self.transcript.count_op(op);
    }

    fn deliver(&mut self, ev: usize) {
        let Event { from, to, run, .. } = self.transcript.events[ev];
        let msg = Frame::from_bytes(&self.transcript.events[ev].frame).and_then(|f| unframe(&f));
        let msg = match msg {
            Ok(m) => m,
            Err(_) => {
                self.set_outcome(ev, Outcome::Undecodable);
                // Network entities answer garbage with the same abort as any
                // other failure; UEs stay silent.
                if matches!(to, NodeId::Gnb(_) | NodeId::Cn) {
                    self.send(to, from, run, &Message::Abort);
                }
                return;
            }
        };
        let now = self.now();
        let (run_ue, run_gnb) = {
            let r = &self.transcript.runs[run];
            (r.ue, r.gnb)
        };
        match (to, msg) {
            (NodeId::Ue(u), Message::M1(m1)) => {
                let cell = self.gnbs[run_gnb].id().to_owned();
                if let Err(e) = self.ues[u].accept_m1(&m1, &cell, now) {
                    return self.abort(ev, to, e);
                }
                self.count("ue:accept_m1");
                self.accept(ev, "ue:m1");
                match self.ues[u].make_m2(now, &mut self.rng) {
                    Ok(m2) => {
                        self.count("ue:make_m2");
                        self.send(to, NodeId::Gnb(run_gnb), run, &Message::M2(m2));
                    }
                    Err(e) => self.fail(run, to, Some(e)),
                }
            }
            (NodeId::Ue(u), Message::HoM1(m1)) => {
                let cell = self.gnbs[run_gnb].id().to_owned();
                match self.ues[u].ho_make_m2(&m1, &cell, now, &mut self.rng) {
                    Ok(m2) => {
                        self.count("ue:accept_m1");
                        self.count("ue:ho_make_m2");
                        self.accept(ev, "ue:ho-m1");
                        self.send(to, NodeId::Gnb(run_gnb), run, &Message::HoM2(m2));
                    }
                    Err(e) => self.abort(ev, to, e),
                }
            }
            (NodeId::Gnb(g), Message::M2(m2)) => {
                if let Err(e) = self.gnbs[g].accept_m2(&m2, now) {
                    return self.reject(ev, to, e);
                }
                self.count("gnb:accept_m2");
                self.accept(ev, "gnb:m2");
                let m3 = self.gnbs[g].make_m3(&m2, now);
                self.count("gnb:make_m3");
                self.send(to, NodeId::Cn, run, &Message::M3(m3));
            }
            (NodeId::Cn, Message::M3(m3)) => {
                let gnb_id = match from {
                    NodeId::Gnb(g) if g < self.gnbs.len() => self.gnbs[g].id().to_owned(),
                    _ => String::new(),
                };
                let req = match self.cn.accept_m3(&gnb_id, &m3, now) {
                    Ok(r) => r,
                    Err(e) => return self.reject(ev, to, e),
                };
                self.count("cn:accept_m3");
                self.accept(ev, "cn:m3");
                let issued = match self.cn.issue_m4(&req, now, &mut self.rng) {
                    Ok(i) => i,
                    Err(e) => return self.reject(ev, to, e),
                };
                self.count("cn:issue_m4");
                let r = self.mvno.record_issuance(&issued.report);
                self.note("mvno:record_issuance", r);
                self.send(to, from, run, &Message::M4(issued.m4));
            }
            (NodeId::Gnb(g), Message::M4(m4)) => match self.gnbs[g].relay_m4(&m4) {
                Ok((fwd, key)) => {
                    self.count("gnb:relay_m4");
                    self.accept(ev, "gnb:m4");
                    if let Some(k) = key {
                        self.gnb_keys.insert(run, k);
                    }
                    self.send(to, NodeId::Ue(run_ue), run, &Message::M4(fwd));
                }
                Err(e) => {
                    self.abort(ev, to, e);
                    self.send(to, NodeId::Ue(run_ue), run, &Message::Abort);
                }
            },
            (NodeId::Gnb(_), Message::Abort) if from == NodeId::Cn => {
                self.accept(ev, "gnb:abort");
                self.send(to, NodeId::Ue(run_ue), run, &Message::Abort);
            }
            (NodeId::Ue(u), Message::M4(m4)) => match self.ues[u].process_m4(&m4, now) {
                Ok(_) => {
                    self.count("ue:process_m4");
                    self.accept(ev, "ue:m4");
                    let agreed = match (self.gnb_keys.get(&run), self.ues[u].session_key()) {
                        (Some(a), Some(b)) => a == b,
                        _ => false,
                    };
                    if agreed {
                        self.transcript.runs[run].checkpoints.push("keys-agree");
                    }
                    self.finish(run);
                }
                Err(e) => self.abort(ev, to, e),
            },
            (NodeId::Gnb(g), Message::HoM2(m2)) => {
                if let Err(e) = self.gnbs[g].ho_accept_m2(&m2, now) {
                    return self.reject(ev, to, e);
                }
                self.count("gnb:ho_accept_m2");
                self.accept(ev, "gnb:ho-m2");
                match self.gnbs[g].ho_make_m3(&m2, &mut self.rng) {
                    Ok(m3) => {
                        self.count("gnb:ho_make_m3");
                        self.send(to, from, run, &Message::HoM3(m3));
                    }
                    Err(e) => self.reject(ev, to, e),
                }
            }
            (NodeId::Ue(u), Message::HoM3(m3)) => match self.ues[u].ho_process_m3(&m3) {
                Ok(()) => {
                    self.count("ue:ho_process_m3");
                    self.accept(ev, "ue:ho-m3");
                    self.finish(run);
                }
                Err(e) => self.abort(ev, to, e),
            },
            (NodeId::Ue(_), Message::Abort) => {
                self.accept(ev, "ue:abort");
                self.fail(run, to, None);
            }
            _ => self.set_outcome(ev, Outcome::Unexpected),
        }
    }

    fn finish(&mut self, run: usize) {
        let r = &mut self.transcript.runs[run];
        if r.status == RunStatus::Pending && r.kind != RunKind::Adversarial {
            r.status = RunStatus::Accepted;
        }
    }
}
