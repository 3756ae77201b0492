use curve25519_dalek::scalar::Scalar;
use rand_core::CryptoRngCore;
use zeroize::Zeroize;

use super::messages::{session_keys, HO_ACK_LABEL, M2_LABEL, UID_LABEL};
use super::{
    aka_context, check_fresh, ho_context, AuthPayload, HoM2, HoM3, NetworkDirectory,
    ProtocolConfig, ProtocolError, ReplayCache, Timestamp, UserCredential, M1, M2, M4,
};
use crate::primitives::{
    commit, digest, pke_decrypt, random_scalar, verify, CommitmentKey, EncKeyPair, SigKeyPair,
    Signature, VerifyKey,
};
use crate::zk::{
    escrow_tag, identity_scalar, make_tag, prove_membership, AuthorizedList, Crs, EscrowKey,
    IdentityTag, Witness,
};

pub const UID_LEN: usize = 16;

/// A CN-issued universal identity, the UE's handover credential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UidRecord {
    pub uid: [u8; UID_LEN],
    pub signature: Signature,
    pub issued_at: Timestamp,
}

impl UidRecord {
    pub const ENCODED_LEN: usize = 64 + UID_LEN + 8;

    pub(crate) fn signed_bytes(uid: &[u8; UID_LEN], issued_at: Timestamp) -> Vec<u8> {
        [UID_LABEL, uid.as_slice(), issued_at.to_bytes().as_slice()].concat()
    }

    /// `σ_U (64) ‖ UID (16) ‖ τ_4 (8)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        [
            self.signature.as_bytes().as_slice(),
            self.uid.as_slice(),
            self.issued_at.to_bytes().as_slice(),
        ]
        .concat()
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.len() != Self::ENCODED_LEN {
            return None;
        }
        Some(Self {
            signature: Signature(bytes[..64].try_into().ok()?),
            uid: bytes[64..80].try_into().ok()?,
            issued_at: Timestamp(u64::from_be_bytes(bytes[80..].try_into().ok()?)),
        })
    }

    pub fn verify(&self, spk_cn: &VerifyKey) -> bool {
        verify(
            spk_cn,
            &Self::signed_bytes(&self.uid, self.issued_at),
            &self.signature,
        )
        .is_ok()
    }

    pub fn identity(&self) -> Scalar {
        identity_scalar("uid", &self.uid)
    }

    pub fn tag(&self) -> IdentityTag {
        make_tag(&self.identity())
    }
}

struct AkaSession {
    enc: EncKeyPair,
}

struct HoSession {
    enc: EncKeyPair,
    sent: Signature,
    gnb_id: String,
}

pub struct Ue {
    pid: Scalar,
    crs: Crs,
    ck: CommitmentKey,
    escrow_key: EscrowKey,
    aka_list: AuthorizedList,
    ho_list: Option<AuthorizedList>,
    directory: NetworkDirectory,
    config: ProtocolConfig,
    m1_seen: ReplayCache,
    camped: Option<String>,
    uid: Option<UidRecord>,
    session_key: Option<[u8; 32]>,
    aka: Option<AkaSession>,
    ho: Option<HoSession>,
}

impl Drop for Ue {
    fn drop(&mut self) {
        self.pid.zeroize();
        if let Some(k) = self.session_key.as_mut() {
            k.zeroize();
        }
    }
}

impl std::fmt::Debug for Ue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ue")
            .field("has_uid", &self.uid.is_some())
            .finish_non_exhaustive()
    }
}

impl Ue {
    pub fn new(credential: UserCredential, config: ProtocolConfig) -> Self {
        Self {
            pid: credential.pid,
            crs: credential.crs.clone(),
            ck: credential.ck.clone(),
            escrow_key: credential.escrow_key,
            aka_list: credential.aka_list.clone(),
            ho_list: None,
            directory: credential.directory.clone(),
            m1_seen: ReplayCache::new(config.replay_cache_size),
            config,
            camped: None,
            uid: None,
            session_key: None,
            aka: None,
            ho: None,
        }
    }

    pub fn update_aka_list(&mut self, list: AuthorizedList) {
        self.aka_list = list;
    }

    pub fn update_ho_list(&mut self, list: AuthorizedList) {
        self.ho_list = Some(list);
    }

    pub fn update_directory(&mut self, directory: NetworkDirectory) {
        self.directory = directory;
    }

    pub fn uid(&self) -> Option<&UidRecord> {
        self.uid.as_ref()
    }

    pub fn session_key(&self) -> Option<&[u8; 32]> {
        self.session_key.as_ref()
    }

    pub fn pid_tag(&self) -> IdentityTag {
        make_tag(&self.pid)
    }

    /// Raw pseudonym, for the harness's leak scan only.
    pub(crate) fn pid_bytes(&self) -> [u8; 32] {
        crate::primitives::encode_scalar(&self.pid)
    }

    /// Checks a broadcast certificate from the cell the UE is camping on.
    pub fn accept_m1(&mut self, m1: &M1, cell: &str, now: Timestamp) -> Result<(), ProtocolError> {
        let cert = &m1.certificate;
        if cert.gnb_id() != cell {
            return Err(ProtocolError::BadCertificate);
        }
        let (Some(cn), Some(gnb)) = (self.directory.cn, self.directory.gnbs.get(cell)) else {
            return Err(ProtocolError::BadCertificate);
        };
        if cert.expiry() <= now {
            return Err(ProtocolError::BadCertificate);
        }
        check_fresh(cert.stamp(), now, &self.config)?;
        cert.verify(&cn.sansig_pk, &gnb.sanitizer_key)
            .map_err(|_| ProtocolError::BadCertificate)?;
        let key = digest("mvno-aka/ue/m1", &[&cert.signature().to_bytes()]);
        if !self.m1_seen.insert(key) {
            return Err(ProtocolError::DuplicateMessage);
        }
        self.camped = Some(cell.to_owned());
        Ok(())
    }

    /// Step 2 after an accepted `M1`.
    pub fn make_m2<R: CryptoRngCore + ?Sized>(
        &mut self,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<M2, ProtocolError> {
        if self.camped.is_none() {
            return Err(ProtocolError::NoSession);
        }
        if !self.aka_list.contains(&make_tag(&self.pid)) {
            return Err(ProtocolError::NotInList);
        }
        let enc = EncKeyPair::generate(rng);
        let sig = SigKeyPair::generate(rng);
        let witness = Witness {
            identity: self.pid,
            randomness: random_scalar(rng),
        };
        let enc_key = *enc.encryption_key();
        let verify_key = sig.verify_key();
        let context = aka_context(&session_keys(&enc_key, &verify_key));
        let proof = prove_membership(&self.crs, &self.ck, &witness, &self.aka_list, &context, rng)
            .map_err(|_| ProtocolError::NotInList)?;
        let (escrow, escrow_proof) =
            escrow_tag(&self.ck, &self.escrow_key, &witness, &context, rng);
        let payload = AuthPayload {
            proof,
            commitment: commit(&self.ck, &witness.identity, &witness.randomness),
            enc_key,
            verify_key,
            escrow,
            escrow_proof,
        };
        let signature = sig.sign(&payload.signed_bytes(M2_LABEL, now));
        self.aka = Some(AkaSession { enc });
        Ok(M2 {
            payload,
            timestamp: now,
            signature,
        })
    }

    pub fn process_m1<R: CryptoRngCore + ?Sized>(
        &mut self,
        m1: &M1,
        cell: &str,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<M2, ProtocolError> {
        self.accept_m1(m1, cell, now)?;
        self.make_m2(now, rng)
    }

    pub fn process_m4(&mut self, m4: &M4, now: Timestamp) -> Result<UidRecord, ProtocolError> {
        let session = self.aka.as_ref().ok_or(ProtocolError::NoSession)?;
        let spk_cn = self.directory.cn.ok_or(ProtocolError::NotSetUp)?.spk;
        let mut plaintext = pke_decrypt(session.enc.decryption_key(), &m4.ciphertext)
            .map_err(|_| ProtocolError::DecryptFail)?;
        let (record_bytes, key) = match plaintext.len() {
            UidRecord::ENCODED_LEN => (&plaintext[..], None),
            n if n == UidRecord::ENCODED_LEN + 32 => {
                let (r, k) = plaintext.split_at(UidRecord::ENCODED_LEN);
                (r, Some(<[u8; 32]>::try_from(k).expect("32 bytes")))
            }
            _ => return Err(ProtocolError::DecryptFail),
        };
        let record = UidRecord::from_bytes(record_bytes).ok_or(ProtocolError::DecryptFail)?;
        plaintext.zeroize();
        check_fresh(record.issued_at, now, &self.config)?;
        if !record.verify(&spk_cn) {
            return Err(ProtocolError::BadSignature);
        }
        self.aka = None;
        self.session_key = key;
        self.uid = Some(record.clone());
        Ok(record)
    }

    /// Handover Step 2: answers the target cell's `M1` with a membership
    /// proof over the handover list.
    pub fn ho_make_m2<R: CryptoRngCore + ?Sized>(
        &mut self,
        m1: &M1,
        cell: &str,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<HoM2, ProtocolError> {
        let record = self.uid.clone().ok_or(ProtocolError::NoUid)?;
        self.accept_m1(m1, cell, now)?;
        let list = self.ho_list.as_ref().ok_or(ProtocolError::NotInList)?;
        let enc = EncKeyPair::generate(rng);
        let sig = SigKeyPair::generate(rng);
        let witness = Witness {
            identity: record.identity(),
            randomness: random_scalar(rng),
        };
        let enc_key = *enc.encryption_key();
        let verify_key = sig.verify_key();
        let context = ho_context(&session_keys(&enc_key, &verify_key));
        let proof = prove_membership(&self.crs, &self.ck, &witness, list, &context, rng)
            .map_err(|_| ProtocolError::NotInList)?;
        let mut m2 = HoM2 {
            proof,
            commitment: commit(&self.ck, &witness.identity, &witness.randomness),
            enc_key,
            verify_key,
            signature: Signature([0; 64]),
            timestamp: now,
        };
        m2.signature = sig.sign(&m2.signed_bytes());
        self.ho = Some(HoSession {
            enc,
            sent: m2.signature,
            gnb_id: cell.to_owned(),
        });
        Ok(m2)
    }

    pub fn ho_process_m3(&mut self, m3: &HoM3) -> Result<(), ProtocolError> {
        let session = self.ho.as_ref().ok_or(ProtocolError::NoSession)?;
        let plaintext = pke_decrypt(session.enc.decryption_key(), &m3.ciphertext)
            .map_err(|_| ProtocolError::DecryptFail)?;
        if plaintext.len() != 128 {
            return Err(ProtocolError::DecryptFail);
        }
        let (ack, echoed) = plaintext.split_at(64);
        if echoed != session.sent.as_bytes() {
            return Err(ProtocolError::AckMismatch);
        }
        let gnb = self
            .directory
            .gnbs
            .get(&session.gnb_id)
            .ok_or(ProtocolError::AckMismatch)?;
        let ack = Signature(ack.try_into().expect("64 bytes"));
        verify(
            &gnb.verify_key,
            &[HO_ACK_LABEL, session.sent.as_bytes().as_slice()].concat(),
            &ack,
        )
        .map_err(|_| ProtocolError::AckMismatch)?;
        self.ho = None;
        Ok(())
    }
}
