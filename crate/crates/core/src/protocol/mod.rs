//! Entity state machines for registration, initial authentication (AKA),
//! handover (HO) and revocation.
//!
//! Entities never talk to each other directly. Every method takes the
//! incoming message and the caller's clock reading and returns the outgoing
//! message, so a driver (the [`crate::harness`] scheduler or an application)
//! owns transport, time and interleaving.
//!
//! ```text
//!  gNB ──M1──▶ UE ──M2──▶ gNB ──M3──▶ CN ──M4──▶ (gNB) ──▶ UE        AKA
//!  gNB ──M1──▶ UE ──HO-M2──▶ gNB ──HO-M3──▶ UE                     handover
//! ```

mod certificate;
mod cn;
mod gnb;
mod messages;
mod mno;
mod mvno;
mod replay;
mod ue;

use thiserror::Error;

pub use certificate::GnbCertificate;
pub use cn::{sync_handover_list, AcceptedRequest, Cn, HoParams, IssuedUid};
pub use gnb::Gnb;
pub use messages::{AuthPayload, HoM2, HoM3, M1, M2, M3, M4};
pub use mno::{CnKeyBundle, CnPublic, GnbProvision, GnbPublic, Mno, NetworkDirectory};
pub use mvno::{
    exchange_params, EscrowReport, Mvno, RevocationNotice, SystemParams, UserCredential,
};
pub use replay::ReplayCache;
pub use ue::{Ue, UidRecord, UID_LEN};

/// Milliseconds since the Unix epoch, as read from the driver's clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub fn to_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }

    pub fn plus_ms(self, ms: u64) -> Self {
        Timestamp(self.0.saturating_add(ms))
    }

    pub fn within(self, now: Timestamp, skew_ms: u64) -> bool {
        self.0.abs_diff(now.0) <= skew_ms
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolConfig {
    /// Accepted distance between a message timestamp and the receiver clock.
    pub skew_ms: u64,
    /// Let the CN hand a fresh session key to both the UE and the serving gNB
    /// inside M4.
    pub session_keys: bool,
    /// Entries kept by each receiver's duplicate-message cache.
    pub replay_cache_size: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            skew_ms: 5_000,
            session_keys: false,
            replay_cache_size: 4_096,
        }
    }
}

/// Why an entity refused to proceed. These stay inside the entity and the
/// harness transcript; on the wire every network-side failure looks the same.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Error, serde::Serialize)]
pub enum ProtocolError {
    #[error("already set up")]
    DoubleSetup,
    #[error("not set up")]
    NotSetUp,
    #[error("base station already registered")]
    DuplicateGnb,
    #[error("certificate expiry is not in the future")]
    ExpiredExp,
    #[error("unknown base station")]
    UnknownGnb,
    #[error("user already registered")]
    DuplicateUser,
    #[error("unknown user")]
    UnknownUser,
    #[error("unknown identity tag")]
    UnknownTag,
    #[error("list version went backwards")]
    VersionRegression,
    #[error("certificate expired")]
    ExpiredCertificate,
    #[error("timestamp outside the freshness window")]
    StaleTimestamp,
    #[error("base station certificate rejected")]
    BadCertificate,
    #[error("identity not in the authorized list")]
    NotInList,
    #[error("signature rejected")]
    BadSignature,
    #[error("membership proof rejected")]
    BadProof,
    #[error("message already seen")]
    DuplicateMessage,
    #[error("decryption failed")]
    DecryptFail,
    #[error("no universal identity held")]
    NoUid,
    #[error("no session in progress")]
    NoSession,
    #[error("acknowledgement does not match")]
    AckMismatch,
}

impl ProtocolError {
    pub const ALL: [ProtocolError; 20] = [
        Self::DoubleSetup,
        Self::NotSetUp,
        Self::DuplicateGnb,
        Self::ExpiredExp,
        Self::UnknownGnb,
        Self::DuplicateUser,
        Self::UnknownUser,
        Self::UnknownTag,
        Self::VersionRegression,
        Self::ExpiredCertificate,
        Self::StaleTimestamp,
        Self::BadCertificate,
        Self::NotInList,
        Self::BadSignature,
        Self::BadProof,
        Self::DuplicateMessage,
        Self::DecryptFail,
        Self::NoUid,
        Self::NoSession,
        Self::AckMismatch,
    ];

    /// Stable numeric code for transcripts.
    pub fn reason_code(self) -> u8 {
        Self::ALL.iter().position(|e| *e == self).expect("listed") as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::DoubleSetup => "DoubleSetup",
            Self::NotSetUp => "NotSetUp",
            Self::DuplicateGnb => "DuplicateGnb",
            Self::ExpiredExp => "ExpiredExp",
            Self::UnknownGnb => "UnknownGnb",
            Self::DuplicateUser => "DuplicateUser",
            Self::UnknownUser => "UnknownUser",
            Self::UnknownTag => "UnknownTag",
            Self::VersionRegression => "VersionRegression",
            Self::ExpiredCertificate => "ExpiredCertificate",
            Self::StaleTimestamp => "StaleTimestamp",
            Self::BadCertificate => "BadCertificate",
            Self::NotInList => "NotInList",
            Self::BadSignature => "BadSignature",
            Self::BadProof => "BadProof",
            Self::DuplicateMessage => "DuplicateMessage",
            Self::DecryptFail => "DecryptFail",
            Self::NoUid => "NoUid",
            Self::NoSession => "NoSession",
            Self::AckMismatch => "AckMismatch",
        }
    }
}

fn check_fresh(
    ts: Timestamp,
    now: Timestamp,
    config: &ProtocolConfig,
) -> Result<(), ProtocolError> {
    if ts.within(now, config.skew_ms) {
        Ok(())
    } else {
        Err(ProtocolError::StaleTimestamp)
    }
}

/// Proof context for AKA: binds the session's ephemeral keys to the
/// anonymous credential.
fn aka_context(payload_keys: &[u8]) -> Vec<u8> {
    [b"mvno-aka/aka".as_slice(), payload_keys].concat()
}

fn ho_context(payload_keys: &[u8]) -> Vec<u8> {
    [b"mvno-aka/ho".as_slice(), payload_keys].concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reason_codes_are_distinct_and_nonzero() {
        let codes: std::collections::BTreeSet<u8> =
            ProtocolError::ALL.iter().map(|e| e.reason_code()).collect();
        assert_eq!(codes.len(), ProtocolError::ALL.len());
        assert!(!codes.contains(&0));
    }

    #[test]
    fn freshness_window_is_symmetric() {
        let now = Timestamp(10_000);
        assert!(Timestamp(5_000).within(now, 5_000));
        assert!(Timestamp(15_000).within(now, 5_000));
        assert!(!Timestamp(4_999).within(now, 5_000));
        assert!(!Timestamp(15_001).within(now, 5_000));
    }
}
