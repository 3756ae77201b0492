use super::{GnbCertificate, Timestamp};
use crate::primitives::{digest, Commitment, EncryptionKey, Signature, VerifyKey};
use crate::zk::{EscrowProof, MembershipProof, TagEscrow};

/// `M1` (also the first handover message): the gNB's freshly sanitized
/// certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M1 {
    pub certificate: GnbCertificate,
}

/// Anonymous access request carried unchanged from the UE through the gNB to
/// the CN.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthPayload {
    pub proof: MembershipProof,
    pub commitment: Commitment,
    pub enc_key: EncryptionKey,
    pub verify_key: VerifyKey,
    /// The pseudonym's tag encrypted to the MVNO, for revocation.
    pub escrow: TagEscrow,
    pub escrow_proof: EscrowProof,
}

/// `M2`: UE → gNB, signed with the UE's per-session key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M2 {
    pub payload: AuthPayload,
    pub timestamp: Timestamp,
    pub signature: Signature,
}

/// `M3`: gNB → CN, the `M2` payload countersigned by the gNB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M3 {
    pub payload: AuthPayload,
    pub timestamp: Timestamp,
    pub signature: Signature,
}

/// `M4`: CN → UE. With session keys enabled, `gnb_ciphertext` carries the
/// serving gNB's copy of the key and is stripped by the gNB before relaying.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M4 {
    pub ciphertext: Vec<u8>,
    pub gnb_ciphertext: Option<Vec<u8>>,
}

/// Handover request: UE → target gNB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoM2 {
    pub proof: MembershipProof,
    pub commitment: Commitment,
    pub enc_key: EncryptionKey,
    pub verify_key: VerifyKey,
    pub signature: Signature,
    pub timestamp: Timestamp,
}

/// Handover confirmation: target gNB → UE, encrypted `ACK ‖ σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoM3 {
    pub ciphertext: Vec<u8>,
}

pub(crate) fn session_keys(enc_key: &EncryptionKey, verify_key: &VerifyKey) -> [u8; 64] {
    let mut out = [0u8; 64];
    out[..32].copy_from_slice(enc_key.as_bytes());
    out[32..].copy_from_slice(verify_key.as_bytes());
    out
}

pub(crate) fn replay_key(commitment: &Commitment, enc_key: &EncryptionKey) -> [u8; 32] {
    digest(
        "mvno-aka/replay",
        &[commitment.as_bytes(), enc_key.as_bytes()],
    )
}

impl AuthPayload {
    pub(crate) fn signed_bytes(&self, label: &[u8], timestamp: Timestamp) -> Vec<u8> {
        let mut out = label.to_vec();
        crate::wire::encode_auth_payload(self, &mut out);
        out.extend_from_slice(&timestamp.to_bytes());
        out
    }

    pub(crate) fn keys(&self) -> [u8; 64] {
        session_keys(&self.enc_key, &self.verify_key)
    }
}

pub(crate) const M2_LABEL: &[u8] = b"mvno-aka/m2";
pub(crate) const M3_LABEL: &[u8] = b"mvno-aka/m3";
pub(crate) const UID_LABEL: &[u8] = b"mvno-aka/uid";
pub(crate) const HO_M2_LABEL: &[u8] = b"mvno-aka/ho-m2";
pub(crate) const HO_ACK_LABEL: &[u8] = b"mvno-aka/ho-ack";

impl HoM2 {
    pub(crate) fn signed_bytes(&self) -> Vec<u8> {
        let mut out = HO_M2_LABEL.to_vec();
        self.proof.encode_into(&mut out);
        out.extend_from_slice(self.commitment.as_bytes());
        out.extend_from_slice(self.enc_key.as_bytes());
        out.extend_from_slice(self.verify_key.as_bytes());
        out.extend_from_slice(&self.timestamp.to_bytes());
        out
    }

    pub(crate) fn keys(&self) -> [u8; 64] {
        session_keys(&self.enc_key, &self.verify_key)
    }
}
