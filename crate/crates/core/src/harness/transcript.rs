use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::NodeId;
use crate::protocol::ProtocolError;
use crate::wire::{tag_name, Container};

/// Every protocol operation the harness can drive, by transcript name.
pub const OPERATIONS: &[&str] = &[
    "mno:setup_cn",
    "mno:register_gnb",
    "mvno:setup",
    "exchange_params",
    "mvno:register_user",
    "cn:push_aka_list",
    "cn:issue_uid",
    "sync_handover_list",
    "gnb:make_m1",
    "ue:accept_m1",
    "ue:make_m2",
    "gnb:accept_m2",
    "gnb:make_m3",
    "cn:accept_m3",
    "cn:issue_m4",
    "mvno:record_issuance",
    "gnb:relay_m4",
    "ue:process_m4",
    "ue:ho_make_m2",
    "gnb:ho_accept_m2",
    "gnb:ho_make_m3",
    "ue:ho_process_m3",
    "mvno:revoke_user",
    "cn:apply_revocation",
];

/// What the adversary layer did with a frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Disposition {
    Delivered,
    Dropped,
    Modified,
    Replayed(usize),
    Injected,
    Redirected(NodeId),
}

/// What the receiver made of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// Not yet delivered, or never will be (dropped).
    Pending,
    Accepted(&'static str),
    Aborted(ProtocolError),
    /// The frame did not parse.
    Undecodable,
    /// Parsed, but the receiver has no handler for it in its role.
    Unexpected,
}

impl Outcome {
    pub fn is_accept(self) -> bool {
        matches!(self, Outcome::Accepted(_))
    }

    /// Internal diagnostic code. Never placed on the wire.
    pub fn reason_code(self) -> u8 {
        match self {
            Outcome::Aborted(e) => e.reason_code(),
            Outcome::Undecodable => 0xFE,
            Outcome::Unexpected => 0xFF,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub index: usize,
    pub step: usize,
    pub time: u64,
    pub run: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub frame: Vec<u8>,
    pub disposition: Disposition,
    pub outcome: Outcome,
}

impl Event {
    pub fn container(&self) -> Option<Container> {
        self.frame.first().and_then(|&b| Container::from_byte(b))
    }

    pub fn type_tag(&self) -> Option<u8> {
        self.frame.get(1).copied()
    }

    /// The frame was actually handed to a receiver.
    pub fn delivered(&self) -> bool {
        self.disposition != Disposition::Dropped
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.from == n || self.to == n
    }
}

/// An off-wire operation (registration, list push, revocation) and how it
/// ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Note {
    pub step: usize,
    pub op: &'static str,
    pub result: Result<(), ProtocolError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunKind {
    Aka,
    Handover,
    /// Frames the adversary originated outside any honest run.
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Pending,
    Accepted,
    Failed {
        at: NodeId,
        reason: Option<ProtocolError>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub id: usize,
    pub kind: RunKind,
    pub ue: usize,
    pub gnb: usize,
    pub step: usize,
    pub status: RunStatus,
    /// Acceptance points passed, in order, e.g. `"cn:m3"`.
    pub checkpoints: Vec<&'static str>,
}

impl RunRecord {
    pub fn accepted(&self) -> bool {
        self.status == RunStatus::Accepted
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub notes: Vec<Note>,
    pub runs: Vec<RunRecord>,
    /// Times each protocol operation ran to completion.
    pub ops: BTreeMap<&'static str, u64>,
    /// Times each error variant was raised.
    pub errors: BTreeMap<&'static str, u64>,
}

impl Transcript {
    pub(crate) fn push_event(&mut self, mut e: Event) -> usize {
        e.index = self.events.len();
        self.events.push(e);
        self.events.len() - 1
    }

    pub(crate) fn count_op(&mut self, op: &'static str) {
        *self.ops.entry(op).or_default() += 1;
    }

    pub(crate) fn count_error(&mut self, e: ProtocolError) {
        *self.errors.entry(e.name()).or_default() += 1;
    }

    pub fn run(&self, id: usize) -> &RunRecord {
        &self.runs[id]
    }

    pub fn run_events(&self, id: usize) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.run == id)
    }

    /// Error variants never raised in this transcript.
    pub fn uncovered_errors(&self) -> Vec<&'static str> {
        ProtocolError::ALL
            .iter()
            .map(|e| e.name())
            .filter(|n| !self.errors.contains_key(n))
            .collect()
    }

    /// Operations from [`OPERATIONS`] that never completed.
    pub fn uncovered_ops(&self) -> Vec<&'static str> {
        OPERATIONS
            .iter()
            .copied()
            .filter(|op| !self.ops.contains_key(op))
            .collect()
    }

    /// Merges counters and appends the other transcript's runs and events
    /// (renumbered). Used to total up coverage across a suite.
    pub fn absorb(&mut self, other: &Transcript) {
        let run_base = self.runs.len();
        let ev_base = self.events.len();
        for r in &other.runs {
            let mut r = r.clone();
            r.id += run_base;
            self.runs.push(r);
        }
        for e in &other.events {
            let mut e = e.clone();
            e.run += run_base;
            if let Disposition::Replayed(i) = e.disposition {
                e.disposition = Disposition::Replayed(i + ev_base);
            }
            self.push_event(e);
        }
        self.notes.extend(other.notes.iter().cloned());
        for (k, v) in &other.ops {
            *self.ops.entry(k).or_default() += v;
        }
        for (k, v) in &other.errors {
            *self.errors.entry(k).or_default() += v;
        }
    }

    /// Line-oriented dump: one header per event followed by the frame in
    /// 32-byte hex rows. Byte-identical for identical runs.
    pub fn to_hex_dump(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let container = e.container().map_or("?", Container::name);
            let msg = e.type_tag().and_then(tag_name).unwrap_or("?");
            let _ = writeln!(
                out,
                "#{} step={} t={} run={} {}->{} {}/{} len={} {:?} {:?}",
                e.index,
                e.step,
                e.time,
                e.run,
                e.from,
                e.to,
                container,
                msg,
                e.frame.len(),
                e.disposition,
                e.outcome,
            );
            for row in e.frame.chunks(32) {
                let _ = writeln!(out, "  {}", hex::encode(row));
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note step={} {} {:?}", n.step, n.op, n.result);
        }
        for r in &self.runs {
            let _ = writeln!(
                out,
                "run {} {:?} ue={} gnb={} {:?} [{}]",
                r.id,
                r.kind,
                r.ue,
                r.gnb,
                r.status,
                r.checkpoints.join(",")
            );
        }
        out
    }
}
