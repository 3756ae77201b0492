//! Frames over a byte stream: a 4-byte big-endian length, then the frame.
//!
//! [`loopback_aka`] runs one AKA with the UE on one side of a local TCP
//! connection and the serving gNB plus CN on the other.

use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use super::{ScenarioConfig, World};
use crate::protocol::{ProtocolError, UidRecord};
use crate::wire::{frame, unframe, Frame, Message};

/// Upper bound on a single frame; comfortably above an `M2` over the
/// largest list.
pub const MAX_FRAME: usize = 1 << 22;

fn invalid(e: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

pub fn write_frame(w: &mut impl Write, f: &Frame) -> io::Result<()> {
    let bytes = f.to_bytes();
    let len = u32::try_from(bytes.len())
        .ok()
        .filter(|&n| n as usize <= MAX_FRAME)
        .ok_or_else(|| invalid("frame too large"))?;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(&bytes)?;
    w.flush()
}

pub fn read_frame(r: &mut impl Read) -> io::Result<Frame> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME {
        return Err(invalid("frame too large"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Frame::from_bytes(&buf).map_err(invalid)
}

pub fn send(w: &mut impl Write, msg: &Message) -> io::Result<()> {
    write_frame(w, &frame(msg).map_err(invalid)?)
}

pub fn recv(r: &mut impl Read) -> io::Result<Message> {
    unframe(&read_frame(r)?).map_err(invalid)
}

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("rejected: {0:?}")]
    Protocol(ProtocolError),
    #[error("network aborted the run")]
    Aborted,
    #[error("unexpected message {0}")]
    Unexpected(&'static str),
    #[error("{0}")]
    Config(#[from] super::ConfigInvalid),
}

/// One AKA between UE 0 and gNB 0 over a loopback TCP socket. Returns the
/// UID the UE ends up holding.
pub fn loopback_aka(config: &ScenarioConfig) -> Result<UidRecord, TransportError> {
    let mut cfg = config.clone();
    cfg.adversary = Default::default();
    cfg.steps = None;
    let seed = cfg.seed;
    let w = World::new(cfg)?;
    let now = w.now();
    let (mut cn, mut gnbs, mut ues) = w.into_entities();
    let mut gnb = gnbs.swap_remove(0);
    let mut ue = ues.swap_remove(0);
    let cell = gnb.id().to_owned();

    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let network = thread::spawn(move || -> io::Result<()> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0074_6370);
        let (mut s, _) = listener.accept()?;
        let m1 = gnb.make_m1(now, &mut rng).map_err(|e| invalid(e.name()))?;
        send(&mut s, &Message::M1(m1))?;
        let reply = match recv(&mut s) {
            Ok(Message::M2(m2)) => gnb
                .process_m2(&m2, now)
                .and_then(|m3| cn.process_m3(gnb.id(), &m3, now, &mut rng))
                .and_then(|issued| gnb.relay_m4(&issued.m4))
                .map_or(Message::Abort, |(m4, _)| Message::M4(m4)),
            _ => Message::Abort,
        };
        send(&mut s, &reply)
    });

    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x7565);
    let mut s = TcpStream::connect(addr)?;
    let result = (|| {
        let m1 = match recv(&mut s)? {
            Message::M1(m) => m,
            other => return Err(TransportError::Unexpected(other.name())),
        };
        let m2 = ue
            .process_m1(&m1, &cell, now, &mut rng)
            .map_err(TransportError::Protocol)?;
        send(&mut s, &Message::M2(m2))?;
        match recv(&mut s)? {
            Message::M4(m4) => ue.process_m4(&m4, now).map_err(TransportError::Protocol),
            Message::Abort => Err(TransportError::Aborted),
            other => Err(TransportError::Unexpected(other.name())),
        }
    })();
    drop(s);
    network
        .join()
        .map_err(|_| TransportError::Unexpected("network thread panicked"))??;
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_prefix_round_trip_and_limits() {
        let mut buf = Vec::new();
        send(&mut buf, &Message::Abort).unwrap();
        assert_eq!(buf, [0, 0, 0, 2, 0x07, 0x7F]);
        assert_eq!(recv(&mut buf.as_slice()).unwrap(), Message::Abort);

        let huge = ((MAX_FRAME + 1) as u32).to_be_bytes();
        assert!(read_frame(&mut huge.as_slice()).is_err());
        assert!(read_frame(&mut [0u8, 0, 0, 5, 0x07].as_slice()).is_err());
    }
}
