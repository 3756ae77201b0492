//! Wall-clock cost of each protocol message.
//!
//! A message's cost is the time its sender spends building it plus the time
//! its receiver spends accepting it. `M2`, for instance, is the UE's proof
//! generation and signing plus the gNB's signature and freshness checks;
//! `M3` is the gNB's countersignature plus the CN's full verification.
//! Timings come from direct entity calls on one thread. The end-to-end
//! figure also includes wire encoding and decoding of every message.

use std::fmt::Write as _;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use serde::Serialize;

use super::{ConfigInvalid, ScenarioConfig, World};
use crate::protocol::{Cn, Gnb, ProtocolError, Timestamp, Ue};
use crate::wire::{decode, encode, Message};
use crate::zk::MAX_LIST_LEN;

pub const CSV_HEADER: &str = "message,entity,mean_ms,p95_ms,bytes";

/// Published per-message timings (ms) of the reference testbed
/// implementation, shown for comparison only.
pub const REFERENCE_MS: [(&str, f64); 4] =
    [("M1", 0.416), ("M2", 12.236), ("M3", 4.876), ("M4", 1.679)];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    pub mean_ms: f64,
    pub p95_ms: f64,
}

impl Stats {
    pub fn of(samples: &[Duration]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
        ms.sort_by(f64::total_cmp);
        let idx = ((ms.len() as f64 * 0.95).ceil() as usize).clamp(1, ms.len()) - 1;
        Self {
            mean_ms: ms.iter().sum::<f64>() / ms.len() as f64,
            p95_ms: ms[idx],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub message: &'static str,
    /// `UE`, `gNB`, `CN`, or `total` for the sum over entities.
    pub entity: &'static str,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub list_size: usize,
    pub iterations: usize,
    pub rows: Vec<BenchRow>,
    pub end_to_end: Stats,
}

impl BenchReport {
    pub fn row(&self, message: &str, entity: &str) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.message == message && r.entity == entity)
    }

    pub fn total_ms(&self, message: &str) -> f64 {
        self.row(message, "total").map_or(f64::NAN, |r| r.mean_ms)
    }

    /// Mean totals rank `M1 < M4 < M3 < M2`, as in the reference table.
    pub fn ordering_holds(&self) -> bool {
        let t = |m| self.total_ms(m);
        t("M1") < t("M4") && t("M4") < t("M3") && t("M3") < t("M2")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{}",
                r.message, r.entity, r.mean_ms, r.p95_ms, r.bytes
            );
        }
        out
    }

    /// Measured totals next to the published reference timings.
    pub fn comparison_table(&self) -> String {
        let mut out = String::from("message,measured_mean_ms,reference_ms\n");
        for (m, reference) in REFERENCE_MS {
            let _ = writeln!(out, "{m},{:.4},{reference}", self.total_ms(m));
        }
        out
    }
}

#[derive(Default)]
struct Samples {
    per: Vec<(&'static str, &'static str, Vec<Duration>, usize)>,
}

impl Samples {
    fn add(&mut self, message: &'static str, entity: &'static str, d: Duration, bytes: usize) {
        match self
            .per
            .iter_mut()
            .find(|(m, e, _, _)| *m == message && *e == entity)
        {
            Some(slot) => {
                slot.2.push(d);
                slot.3 = bytes;
            }
            None => self.per.push((message, entity, vec![d], bytes)),
        }
    }

    fn rows(&self) -> Vec<BenchRow> {
        let mut rows = Vec::new();
        let mut messages: Vec<&'static str> = Vec::new();
        for (m, _, _, _) in &self.per {
            if !messages.contains(m) {
                messages.push(m);
            }
        }
        for m in messages {
            let parts: Vec<_> = self.per.iter().filter(|(pm, ..)| *pm == m).collect();
            let mut bytes = 0;
            for (_, e, d, b) in &parts {
                let s = Stats::of(d);
                bytes = *b;
                rows.push(BenchRow {
                    message: m,
                    entity: e,
                    mean_ms: s.mean_ms,
                    p95_ms: s.p95_ms,
                    bytes: *b,
                });
            }
            let n = parts[0].2.len();
            let totals: Vec<Duration> =
                (0..n).map(|i| parts.iter().map(|p| p.2[i]).sum()).collect();
            let s = Stats::of(&totals);
            rows.push(BenchRow {
                message: m,
                entity: "total",
                mean_ms: s.mean_ms,
                p95_ms: s.p95_ms,
                bytes,
            });
        }
        rows
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn wire_len(m: &Message) -> usize {
    encode(m).expect("encodable").len()
}

/// Encodes and decodes, as a real hop would.
fn hop(m: Message) -> Message {
    decode(&encode(&m).expect("encodable")).expect("round trip")
}

fn bench_world(config: &ScenarioConfig, iterations: usize) -> Result<World, ConfigInvalid> {
    let mut cfg = config.clone();
    cfg.n_ues = 1;
    cfg.n_gnbs = cfg.n_gnbs.max(2);
    cfg.adversary = Default::default();
    cfg.steps = None;
    // Each iteration issues one UID onto the handover list.
    if cfg.list_size + iterations + WARMUP > MAX_LIST_LEN {
        return Err(ConfigInvalid(format!(
            "list-size plus iterations must stay below {MAX_LIST_LEN}"
        )));
    }
    World::new(cfg)
}

const WARMUP: usize = 2;

/// Times `iterations` AKA runs and handovers at the configured list size.
pub fn bench(config: &ScenarioConfig, iterations: usize) -> Result<BenchReport, ConfigInvalid> {
    let mut w = bench_world(config, iterations)?;
    let mut s = Samples::default();
    let mut e2e = Vec::with_capacity(iterations);
    let step = 50;

    for i in 0..iterations + WARMUP {
        let keep = i >= WARMUP;
        w.advance(step);
        w.refresh_ue(0);
        let now = w.now();
        let World {
            ref mut rng,
            ref mut gnbs,
            ref mut ues,
            ref mut cn,
            ref mut mvno,
            ..
        } = w;
        let (g, ue) = (&mut gnbs[0], &mut ues[0]);
        let cell = g.id().to_owned();
        let mut lap = Samples::default();

        let start = Instant::now();
        let (m1, d) = timed(|| g.make_m1(now, rng).expect("valid cert"));
        let m1 = Message::M1(m1);
        lap.add("M1", "gNB", d, wire_len(&m1));
        let Message::M1(m1) = hop(m1) else {
            unreachable!()
        };
        let (r, d) = timed(|| ue.accept_m1(&m1, &cell, now));
        r.expect("genuine M1");
        lap.add("M1", "UE", d, 0);

        let (m2, d) = timed(|| ue.make_m2(now, rng).expect("listed"));
        let m2 = Message::M2(m2);
        lap.add("M2", "UE", d, wire_len(&m2));
        let Message::M2(m2) = hop(m2) else {
            unreachable!()
        };
        let (r, d) = timed(|| g.accept_m2(&m2, now));
        r.expect("fresh M2");
        lap.add("M2", "gNB", d, 0);

        let (m3, d) = timed(|| g.make_m3(&m2, now));
        let m3 = Message::M3(m3);
        lap.add("M3", "gNB", d, wire_len(&m3));
        let Message::M3(m3) = hop(m3) else {
            unreachable!()
        };
        let (req, d) = timed(|| cn.accept_m3(&cell, &m3, now));
        let req = req.expect("honest M3");
        lap.add("M3", "CN", d, 0);

        let (issued, d) = timed(|| cn.issue_m4(&req, now, rng).expect("issued"));
        let m4 = Message::M4(issued.m4);
        lap.add("M4", "CN", d, wire_len(&m4));
        let Message::M4(m4) = hop(m4) else {
            unreachable!()
        };
        let (fwd, d) = timed(|| g.relay_m4(&m4).expect("relay"));
        lap.add("M4", "gNB", d, 0);
        let Message::M4(fwd) = hop(Message::M4(fwd.0)) else {
            unreachable!()
        };
        let (r, d) = timed(|| ue.process_m4(&fwd, now));
        r.expect("genuine M4");
        lap.add("M4", "UE", d, 0);
        let total = start.elapsed();
        mvno.record_issuance(&issued.report)
            .expect("listed pseudonym");

        // Handover to the second cell, outside the end-to-end span.
        ue.update_ho_list(cn.ho_list().clone());
        let h = &mut gnbs[1];
        crate::protocol::sync_handover_list(cn, h).expect("installed");
        let hcell = h.id().to_owned();
        let (hm1, d) = timed(|| h.make_m1(now, rng).expect("valid cert"));
        let hm1 = Message::HoM1(hm1);
        lap.add("HO-M1", "gNB", d, wire_len(&hm1));
        let Message::HoM1(hm1) = hop(hm1) else {
            unreachable!()
        };
        let (hm2, d) = timed(|| ue.ho_make_m2(&hm1, &hcell, now, rng).expect("has uid"));
        let hm2 = Message::HoM2(hm2);
        lap.add("HO-M2", "UE", d, wire_len(&hm2));
        let Message::HoM2(hm2) = hop(hm2) else {
            unreachable!()
        };
        let (r, d) = timed(|| h.ho_accept_m2(&hm2, now));
        r.expect("listed uid");
        lap.add("HO-M2", "gNB", d, 0);
        let (hm3, d) = timed(|| h.ho_make_m3(&hm2, rng).expect("valid key"));
        let hm3 = Message::HoM3(hm3);
        lap.add("HO-M3", "gNB", d, wire_len(&hm3));
        let Message::HoM3(hm3) = hop(hm3) else {
            unreachable!()
        };
        let (r, d) = timed(|| ue.ho_process_m3(&hm3));
        r.expect("genuine ack");
        lap.add("HO-M3", "UE", d, 0);

        if keep {
            e2e.push(total);
            for (m, e, d, b) in lap.per {
                let bytes = if b == 0 {
                    s.per.iter().find(|p| p.0 == m).map_or(0, |p| p.3)
                } else {
                    b
                };
                s.add(m, e, d[0], bytes);
            }
        }
    }

    // Receiver rows carry the message's size too.
    let mut rows = s.rows();
    for i in 0..rows.len() {
        if rows[i].bytes == 0 {
            let m = rows[i].message;
            rows[i].bytes = rows
                .iter()
                .map(|r| if r.message == m { r.bytes } else { 0 })
                .max()
                .unwrap_or(0);
        }
    }
    Ok(BenchReport {
        list_size: w.config().list_size,
        iterations,
        rows,
        end_to_end: Stats::of(&e2e),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThroughputReport {
    pub ues: usize,
    pub gnbs: usize,
    pub runs: usize,
    pub accepted: usize,
    pub elapsed_ms: f64,
    pub runs_per_sec: f64,
}

enum ToGnb {
    Hello(mpsc::Sender<Vec<u8>>),
    M2(Vec<u8>, mpsc::Sender<Vec<u8>>),
}

struct ToCn {
    gnb: String,
    m3: Vec<u8>,
    reply: mpsc::Sender<Vec<u8>>,
}

fn clock(start: Instant) -> Timestamp {
    Timestamp(super::T0 + start.elapsed().as_millis() as u64)
}

fn abort() -> Vec<u8> {
    encode(&Message::Abort).expect("encodable")
}

fn gnb_loop(
    mut g: Gnb,
    rx: mpsc::Receiver<ToGnb>,
    cn: mpsc::Sender<ToCn>,
    seed: u64,
    start: Instant,
) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for msg in rx {
        let now = clock(start);
        match msg {
            ToGnb::Hello(reply) => {
                let m1 = g.make_m1(now, &mut rng).map(Message::M1);
                let _ = reply.send(m1.map_or_else(|_| abort(), |m| encode(&m).expect("encodable")));
            }
            ToGnb::M2(bytes, reply) => {
                let m3 = match decode(&bytes) {
                    Ok(Message::M2(m2)) => g.process_m2(&m2, now).ok(),
                    _ => None,
                };
                let Some(m3) = m3 else {
                    let _ = reply.send(abort());
                    continue;
                };
                let (tx, back) = mpsc::channel();
                let req = ToCn {
                    gnb: g.id().to_owned(),
                    m3: encode(&Message::M3(m3)).expect("encodable"),
                    reply: tx,
                };
                if cn.send(req).is_err() {
                    return;
                }
                let out = match back.recv().ok().map(|b| decode(&b)) {
                    Some(Ok(Message::M4(m4))) => g
                        .relay_m4(&m4)
                        .map(|(f, _)| encode(&Message::M4(f)).expect("encodable"))
                        .unwrap_or_else(|_| abort()),
                    _ => abort(),
                };
                let _ = reply.send(out);
            }
        }
    }
}

fn cn_loop(mut cn: Cn, rx: mpsc::Receiver<ToCn>, seed: u64, start: Instant) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for req in rx {
        let now = clock(start);
        let out = match decode(&req.m3) {
            Ok(Message::M3(m3)) => cn
                .process_m3(&req.gnb, &m3, now, &mut rng)
                .map(|i| encode(&Message::M4(i.m4)).expect("encodable"))
                .unwrap_or_else(|_| abort()),
            _ => abort(),
        };
        let _ = req.reply.send(out);
    }
}

fn ue_loop(
    mut ue: Ue,
    cell: String,
    gnb: mpsc::Sender<ToGnb>,
    runs: usize,
    seed: u64,
    start: Instant,
) -> usize {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut ok = 0;
    for _ in 0..runs {
        let mut run = || -> Result<(), ProtocolError> {
            let (tx, rx) = mpsc::channel();
            gnb.send(ToGnb::Hello(tx.clone()))
                .map_err(|_| ProtocolError::NoSession)?;
            let Ok(Message::M1(m1)) = decode(&rx.recv().map_err(|_| ProtocolError::NoSession)?)
            else {
                return Err(ProtocolError::BadCertificate);
            };
            let m2 = ue.process_m1(&m1, &cell, clock(start), &mut rng)?;
            let bytes = encode(&Message::M2(m2)).expect("encodable");
            gnb.send(ToGnb::M2(bytes, tx))
                .map_err(|_| ProtocolError::NoSession)?;
            let Ok(Message::M4(m4)) = decode(&rx.recv().map_err(|_| ProtocolError::NoSession)?)
            else {
                return Err(ProtocolError::NoSession);
            };
            ue.process_m4(&m4, clock(start)).map(drop)
        };
        ok += run().is_ok() as usize;
    }
    ok
}

/// Throughput with every entity on its own thread, owning its own state and
/// talking over channels. Timestamps come from the wall clock, so runs are
/// not reproducible; this mode exists only to measure contention.
pub fn bench_concurrent(
    config: &ScenarioConfig,
    runs_per_ue: usize,
) -> Result<ThroughputReport, ConfigInvalid> {
    let mut cfg = config.clone();
    cfg.adversary = Default::default();
    cfg.steps = None;
    if cfg.list_size + cfg.n_ues * runs_per_ue > MAX_LIST_LEN {
        return Err(ConfigInvalid(format!(
            "list-size plus total runs must stay below {MAX_LIST_LEN}"
        )));
    }
    let seed = cfg.seed;
    let w = World::new(cfg)?;
    let (cn, gnbs, ues) = w.into_entities();
    let n_gnbs = gnbs.len();
    let n_ues = ues.len();
    let start = Instant::now();

    let (cn_tx, cn_rx) = mpsc::channel();
    let cn_handle = thread::spawn(move || cn_loop(cn, cn_rx, seed ^ 1, start));
    let mut gnb_txs = Vec::new();
    let mut gnb_handles = Vec::new();
    let mut cells = Vec::new();
    for (i, g) in gnbs.into_iter().enumerate() {
        let (tx, rx) = mpsc::channel();
        cells.push(g.id().to_owned());
        let cn_tx = cn_tx.clone();
        gnb_handles.push(thread::spawn(move || {
            gnb_loop(g, rx, cn_tx, seed ^ (0x100 + i as u64), start)
        }));
        gnb_txs.push(tx);
    }
    drop(cn_tx);
    let ue_handles: Vec<_> = ues
        .into_iter()
        .enumerate()
        .map(|(i, ue)| {
            let tx = gnb_txs[i % n_gnbs].clone();
            let cell = cells[i % n_gnbs].clone();
            thread::spawn(move || {
                ue_loop(
                    ue,
                    cell,
                    tx,
                    runs_per_ue,
                    seed ^ (0x10000 + i as u64),
                    start,
                )
            })
        })
        .collect();
    drop(gnb_txs);
    let accepted: usize = ue_handles
        .into_iter()
        .map(|h| h.join().expect("ue thread"))
        .sum();
    let elapsed = start.elapsed();
    for h in gnb_handles {
        h.join().expect("gnb thread");
    }
    cn_handle.join().expect("cn thread");
    let runs = n_ues * runs_per_ue;
    let secs = elapsed.as_secs_f64();
    Ok(ThroughputReport {
        ues: n_ues,
        gnbs: n_gnbs,
        runs,
        accepted,
        elapsed_ms: secs * 1e3,
        runs_per_sec: if secs > 0.0 { runs as f64 / secs } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_is_pinned() {
        let r = BenchReport {
            list_size: 1,
            iterations: 0,
            rows: vec![],
            end_to_end: Stats::default(),
        };
        assert_eq!(r.to_csv(), "message,entity,mean_ms,p95_ms,bytes\n");
    }

    #[test]
    fn p95_index() {
        let d: Vec<Duration> = (1..=20).map(Duration::from_millis).collect();
        let s = Stats::of(&d);
        assert_eq!(s.p95_ms, 19.0);
        assert!((s.mean_ms - 10.5).abs() < 1e-9);
    }
}
