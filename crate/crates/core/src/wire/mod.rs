//! Byte-exact message encoding and 5G container framing.
//!
//! Every message starts with a one-byte type tag. Variable and fixed-size
//! byte fields are prefixed with a 2-byte big-endian length, timestamps are
//! raw 8-byte big-endian milliseconds, and the membership proof is embedded
//! in its own self-delimiting format. Decoding is strict: exactly one byte
//! string decodes to each message value.
//!
//! | tag  | message | layout                                                        |
//! |------|---------|---------------------------------------------------------------|
//! | 0x01 | M1      | location · expiry(8) · id · stamp(8) · sansig                  |
//! | 0x02 | M2      | proof · c · PK · spk · escrow · escrow proof · τ(8) · σ        |
//! | 0x03 | M3      | as M2, σ by the gNB                                           |
//! | 0x04 | M4      | ciphertext · flag(1) · [gNB ciphertext]                       |
//! | 0x11 | HO-M1   | as M1                                                         |
//! | 0x12 | HO-M2   | proof · c · PK · spk · σ · τ(8)                               |
//! | 0x13 | HO-M3   | ciphertext                                                    |
//! | 0x7F | Abort   | (empty)                                                       |

mod frame;
mod measure;

use thiserror::Error;

pub use frame::{frame, unframe, Container, Frame};
pub use measure::{measure, SizeReport};

use crate::primitives::{Commitment, EncryptionKey, SanSigSignature, Signature, VerifyKey};
use crate::protocol::{AuthPayload, GnbCertificate, HoM2, HoM3, Timestamp, M1, M2, M3, M4};
use crate::zk::{EscrowProof, MembershipProof, TagEscrow};

pub const TAG_M1: u8 = 0x01;
pub const TAG_M2: u8 = 0x02;
pub const TAG_M3: u8 = 0x03;
pub const TAG_M4: u8 = 0x04;
pub const TAG_HO_M1: u8 = 0x11;
pub const TAG_HO_M2: u8 = 0x12;
pub const TAG_HO_M3: u8 = 0x13;
pub const TAG_ABORT: u8 = 0x7F;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("input ends early")]
    Truncated,
    #[error("unknown message type tag {0:#04x}")]
    BadTag(u8),
    #[error("field longer than 65535 bytes")]
    LengthOverflow,
    #[error("trailing bytes after message")]
    TrailingBytes,
    #[error("malformed {0}")]
    Malformed(&'static str),
    #[error("container {0:#04x} unknown or wrong for this message")]
    BadContainer(u8),
}

/// Any message that can appear on a link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    M1(M1),
    M2(M2),
    M3(M3),
    M4(M4),
    HoM1(M1),
    HoM2(HoM2),
    HoM3(HoM3),
    /// The single rejection signal sent by a network entity, whatever failed.
    Abort,
}

impl Message {
    pub fn type_tag(&self) -> u8 {
        match self {
            Message::M1(_) => TAG_M1,
            Message::M2(_) => TAG_M2,
            Message::M3(_) => TAG_M3,
            Message::M4(_) => TAG_M4,
            Message::HoM1(_) => TAG_HO_M1,
            Message::HoM2(_) => TAG_HO_M2,
            Message::HoM3(_) => TAG_HO_M3,
            Message::Abort => TAG_ABORT,
        }
    }

    pub fn name(&self) -> &'static str {
        tag_name(self.type_tag()).expect("every variant has a tag")
    }
}

pub fn tag_name(tag: u8) -> Option<&'static str> {
    Some(match tag {
        TAG_M1 => "M1",
        TAG_M2 => "M2",
        TAG_M3 => "M3",
        TAG_M4 => "M4",
        TAG_HO_M1 => "HO-M1",
        TAG_HO_M2 => "HO-M2",
        TAG_HO_M3 => "HO-M3",
        TAG_ABORT => "Abort",
        _ => return None,
    })
}

fn put_var(out: &mut Vec<u8>, bytes: &[u8]) -> Result<(), WireError> {
    let len = u16::try_from(bytes.len()).map_err(|_| WireError::LengthOverflow)?;
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(bytes);
    Ok(())
}

/// For fields whose size is fixed by construction.
fn put_small(out: &mut Vec<u8>, bytes: &[u8]) {
    put_var(out, bytes).expect("fixed-size field fits a 16-bit length");
}

pub(crate) fn encode_auth_payload(payload: &AuthPayload, out: &mut Vec<u8>) {
    payload.proof.encode_into(out);
    put_small(out, payload.commitment.as_bytes());
    put_small(out, payload.enc_key.as_bytes());
    put_small(out, payload.verify_key.as_bytes());
    put_small(out, &payload.escrow.to_bytes());
    put_small(out, &payload.escrow_proof.to_bytes());
}

fn encode_certificate(cert: &GnbCertificate, out: &mut Vec<u8>) -> Result<(), WireError> {
    put_var(out, cert.location())?;
    out.extend_from_slice(&cert.expiry().to_bytes());
    put_var(out, cert.gnb_id().as_bytes())?;
    out.extend_from_slice(&cert.stamp().to_bytes());
    put_var(out, &cert.signature().to_bytes())
}

pub fn encode(msg: &Message) -> Result<Vec<u8>, WireError> {
    let mut out = vec![msg.type_tag()];
    match msg {
        Message::M1(m) | Message::HoM1(m) => encode_certificate(&m.certificate, &mut out)?,
        Message::M2(M2 {
            payload,
            timestamp,
            signature,
        })
        | Message::M3(M3 {
            payload,
            timestamp,
            signature,
        }) => {
            encode_auth_payload(payload, &mut out);
            out.extend_from_slice(&timestamp.to_bytes());
            put_small(&mut out, signature.as_bytes());
        }
        Message::M4(m) => {
            put_var(&mut out, &m.ciphertext)?;
            match &m.gnb_ciphertext {
                None => out.push(0),
                Some(ct) => {
                    out.push(1);
                    put_var(&mut out, ct)?;
                }
            }
        }
        Message::HoM2(m) => {
            m.proof.encode_into(&mut out);
            put_small(&mut out, m.commitment.as_bytes());
            put_small(&mut out, m.enc_key.as_bytes());
            put_small(&mut out, m.verify_key.as_bytes());
            put_small(&mut out, m.signature.as_bytes());
            out.extend_from_slice(&m.timestamp.to_bytes());
        }
        Message::HoM3(m) => put_var(&mut out, &m.ciphertext)?,
        Message::Abort => {}
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(n).ok_or(WireError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(WireError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn timestamp(&mut self) -> Result<Timestamp, WireError> {
        Ok(Timestamp(u64::from_be_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        )))
    }

    fn var(&mut self) -> Result<&'a [u8], WireError> {
        let len = u16::from_be_bytes(self.take(2)?.try_into().expect("2 bytes"));
        self.take(len as usize)
    }

    fn fixed<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N], WireError> {
        self.var()?
            .try_into()
            .map_err(|_| WireError::Malformed(what))
    }

    fn proof(&mut self) -> Result<MembershipProof, WireError> {
        let rest = &self.buf[self.pos..];
        match MembershipProof::decode_prefix(rest) {
            Ok((proof, used)) => {
                self.pos += used;
                Ok(proof)
            }
            // a proof cut short by the end of input is a truncation
            Err(_) if truncated_proof(rest) => Err(WireError::Truncated),
            Err(_) => Err(WireError::Malformed("membership proof")),
        }
    }

    fn finish(self) -> Result<(), WireError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(WireError::TrailingBytes)
        }
    }
}

fn truncated_proof(bytes: &[u8]) -> bool {
    if bytes.len() < 5 {
        return true;
    }
    let mut pos = 5;
    for _ in 0..3 {
        let Some(h) = bytes.get(pos..pos + 2) else {
            return true;
        };
        pos += 2 + u16::from_be_bytes([h[0], h[1]]) as usize;
    }
    pos > bytes.len()
}

fn decode_certificate(r: &mut Reader<'_>) -> Result<GnbCertificate, WireError> {
    let location = r.var()?.to_vec();
    let expiry = r.timestamp()?;
    let gnb_id =
        String::from_utf8(r.var()?.to_vec()).map_err(|_| WireError::Malformed("gNB id"))?;
    let stamp = r.timestamp()?;
    let signature = SanSigSignature::from_bytes(r.var()?)
        .map_err(|_| WireError::Malformed("sanitizable signature"))?;
    Ok(GnbCertificate::from_parts(
        location, expiry, gnb_id, stamp, signature,
    ))
}

fn decode_commitment(r: &mut Reader<'_>) -> Result<Commitment, WireError> {
    Commitment::from_bytes(&r.fixed::<32>("commitment")?)
        .map_err(|_| WireError::Malformed("commitment"))
}

fn decode_enc_key(r: &mut Reader<'_>) -> Result<EncryptionKey, WireError> {
    EncryptionKey::from_bytes(&r.fixed::<32>("encryption key")?)
        .map_err(|_| WireError::Malformed("encryption key"))
}

fn decode_auth_payload(r: &mut Reader<'_>) -> Result<AuthPayload, WireError> {
    Ok(AuthPayload {
        proof: r.proof()?,
        commitment: decode_commitment(r)?,
        enc_key: decode_enc_key(r)?,
        verify_key: VerifyKey(r.fixed("verify key")?),
        escrow: TagEscrow::from_bytes(&r.fixed::<64>("escrow")?)
            .map_err(|_| WireError::Malformed("escrow"))?,
        escrow_proof: EscrowProof::from_bytes(&r.fixed::<128>("escrow proof")?)
            .map_err(|_| WireError::Malformed("escrow proof"))?,
    })
}

pub fn decode(bytes: &[u8]) -> Result<Message, WireError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let tag = r.u8()?;
    let msg = match tag {
        TAG_M1 => Message::M1(M1 {
            certificate: decode_certificate(&mut r)?,
        }),
        TAG_HO_M1 => Message::HoM1(M1 {
            certificate: decode_certificate(&mut r)?,
        }),
        TAG_M2 | TAG_M3 => {
            let payload = decode_auth_payload(&mut r)?;
            let timestamp = r.timestamp()?;
            let signature = Signature(r.fixed("signature")?);
            if tag == TAG_M2 {
                Message::M2(M2 {
                    payload,
                    timestamp,
                    signature,
                })
            } else {
                Message::M3(M3 {
                    payload,
                    timestamp,
                    signature,
                })
            }
        }
        TAG_M4 => {
            let ciphertext = r.var()?.to_vec();
            let gnb_ciphertext = match r.u8()? {
                0 => None,
                1 => Some(r.var()?.to_vec()),
                _ => return Err(WireError::Malformed("M4 flag")),
            };
            Message::M4(M4 {
                ciphertext,
                gnb_ciphertext,
            })
        }
        TAG_HO_M2 => Message::HoM2(HoM2 {
            proof: r.proof()?,
            commitment: decode_commitment(&mut r)?,
            enc_key: decode_enc_key(&mut r)?,
            verify_key: VerifyKey(r.fixed("verify key")?),
            signature: Signature(r.fixed("signature")?),
            timestamp: r.timestamp()?,
        }),
        TAG_HO_M3 => Message::HoM3(HoM3 {
            ciphertext: r.var()?.to_vec(),
        }),
        TAG_ABORT => Message::Abort,
        other => return Err(WireError::BadTag(other)),
    };
    r.finish()?;
    Ok(msg)
}
