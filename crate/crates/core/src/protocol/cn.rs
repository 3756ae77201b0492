use std::collections::{BTreeMap, BTreeSet};

use rand_core::CryptoRngCore;

use super::messages::{replay_key, M3_LABEL};
use super::{
    aka_context, check_fresh, CnKeyBundle, CnPublic, EscrowReport, Gnb, GnbPublic, ProtocolConfig,
    ProtocolError, ReplayCache, RevocationNotice, SystemParams, Timestamp, UidRecord, M3, M4,
    UID_LEN,
};
use crate::primitives::{pke_encrypt, verify, CommitmentKey, EncryptionKey};
use crate::zk::{
    identity_scalar, make_tag, verify_escrow, verify_membership, AuthorizedList, Crs, EscrowKey,
    IdentityTag, TagEscrow,
};

/// What a gNB needs to verify handover requests on its own.
#[derive(Clone, Debug)]
pub struct HoParams {
    pub crs: Crs,
    pub ck: CommitmentKey,
    pub list: AuthorizedList,
}

/// An `M3` that passed every check, waiting for its UID.
#[derive(Clone, Debug)]
pub struct AcceptedRequest {
    gnb_id: String,
    enc_key: EncryptionKey,
    escrow: TagEscrow,
}

impl AcceptedRequest {
    pub fn gnb_id(&self) -> &str {
        &self.gnb_id
    }
}

/// Result of a successful AKA at the CN.
#[derive(Clone, Debug)]
pub struct IssuedUid {
    pub m4: M4,
    /// To be forwarded to the MVNO so revocation can find this UID later.
    pub report: EscrowReport,
    pub session_key: Option<[u8; 32]>,
}

#[derive(Clone)]
struct Installed {
    crs: Crs,
    ck: CommitmentKey,
    escrow_key: EscrowKey,
}

pub struct Cn {
    keys: CnKeyBundle,
    config: ProtocolConfig,
    params: Option<Installed>,
    aka_list: AuthorizedList,
    ho_list: AuthorizedList,
    uids: BTreeSet<[u8; UID_LEN]>,
    gnbs: BTreeMap<String, GnbPublic>,
    replay: ReplayCache,
}

impl std::fmt::Debug for Cn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cn")
            .field("aka_list_version", &self.aka_list.version())
            .field("ho_list_version", &self.ho_list.version())
            .field("uids", &self.uids.len())
            .finish_non_exhaustive()
    }
}

impl Cn {
    pub fn new(keys: CnKeyBundle, config: ProtocolConfig) -> Self {
        let replay = ReplayCache::new(config.replay_cache_size);
        Self {
            keys,
            config,
            params: None,
            aka_list: AuthorizedList::new(),
            ho_list: AuthorizedList::new(),
            uids: BTreeSet::new(),
            gnbs: BTreeMap::new(),
            replay,
        }
    }

    pub fn public(&self) -> CnPublic {
        self.keys.public()
    }

    pub fn aka_list(&self) -> &AuthorizedList {
        &self.aka_list
    }

    pub fn ho_list(&self) -> &AuthorizedList {
        &self.ho_list
    }

    pub fn issued_uids(&self) -> usize {
        self.uids.len()
    }

    pub fn install_params(&mut self, params: SystemParams) -> Result<(), ProtocolError> {
        if params.aka_list.version() < self.aka_list.version() {
            return Err(ProtocolError::VersionRegression);
        }
        self.params = Some(Installed {
            crs: params.crs,
            ck: params.ck,
            escrow_key: params.escrow_key,
        });
        self.aka_list = params.aka_list;
        Ok(())
    }

    /// Replaces the AKA list with a newer MVNO snapshot.
    pub fn push_aka_list(&mut self, list: AuthorizedList) -> Result<(), ProtocolError> {
        if self.params.is_none() {
            return Err(ProtocolError::NotSetUp);
        }
        if list.version() < self.aka_list.version() {
            return Err(ProtocolError::VersionRegression);
        }
        self.aka_list = list;
        Ok(())
    }

    pub fn enroll_gnb(&mut self, id: &str, public: GnbPublic) {
        self.gnbs.insert(id.to_owned(), public);
    }

    pub fn ho_params(&self) -> Result<HoParams, ProtocolError> {
        let p = self.params.as_ref().ok_or(ProtocolError::NotSetUp)?;
        Ok(HoParams {
            crs: p.crs.clone(),
            ck: p.ck.clone(),
            list: self.ho_list.clone(),
        })
    }

    /// Checks an `M3` relayed by gNB `gnb_id`: freshness, the gNB's
    /// countersignature, duplicates, the membership proof against the current
    /// AKA list and the escrow proof.
    pub fn accept_m3(
        &mut self,
        gnb_id: &str,
        m3: &M3,
        now: Timestamp,
    ) -> Result<AcceptedRequest, ProtocolError> {
        let params = self.params.as_ref().ok_or(ProtocolError::NotSetUp)?;
        let gnb = self.gnbs.get(gnb_id).ok_or(ProtocolError::UnknownGnb)?;
        check_fresh(m3.timestamp, now, &self.config)?;
        let payload = &m3.payload;
        verify(
            &gnb.verify_key,
            &payload.signed_bytes(M3_LABEL, m3.timestamp),
            &m3.signature,
        )
        .map_err(|_| ProtocolError::BadSignature)?;
        let key = replay_key(&payload.commitment, &payload.enc_key);
        if self.replay.contains(&key) {
            return Err(ProtocolError::DuplicateMessage);
        }
        let context = aka_context(&payload.keys());
        verify_membership(
            &params.crs,
            &params.ck,
            &payload.commitment,
            &self.aka_list,
            &context,
            &payload.proof,
        )
        .map_err(|_| ProtocolError::BadProof)?;
        verify_escrow(
            &params.ck,
            &params.escrow_key,
            &payload.commitment,
            &payload.escrow,
            &payload.escrow_proof,
            &context,
        )
        .map_err(|_| ProtocolError::BadProof)?;
        self.replay.insert(key);
        Ok(AcceptedRequest {
            gnb_id: gnb_id.to_owned(),
            enc_key: payload.enc_key,
            escrow: payload.escrow,
        })
    }

    fn new_uid<R: CryptoRngCore + ?Sized>(
        &mut self,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<(UidRecord, IdentityTag), ProtocolError> {
        loop {
            let mut uid = [0u8; UID_LEN];
            rng.fill_bytes(&mut uid);
            if self.uids.contains(&uid) {
                continue;
            }
            let tag = make_tag(&identity_scalar("uid", &uid));
            self.ho_list
                .push(tag)
                .map_err(|_| ProtocolError::UnknownTag)?;
            self.uids.insert(uid);
            let signature = self.keys.signing.sign(&UidRecord::signed_bytes(&uid, now));
            return Ok((
                UidRecord {
                    uid,
                    signature,
                    issued_at: now,
                },
                tag,
            ));
        }
    }

    /// Issues a UID for an accepted request and encrypts it to the UE's
    /// session key.
    pub fn issue_m4<R: CryptoRngCore + ?Sized>(
        &mut self,
        request: &AcceptedRequest,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<IssuedUid, ProtocolError> {
        let gnb_key = self
            .gnbs
            .get(&request.gnb_id)
            .ok_or(ProtocolError::UnknownGnb)?
            .enc_key;
        let (record, uid_tag) = self.new_uid(now, rng)?;
        let mut plaintext = record.to_bytes();
        let mut session_key = None;
        let mut gnb_ciphertext = None;
        if self.config.session_keys {
            let mut k = [0u8; 32];
            rng.fill_bytes(&mut k);
            plaintext.extend_from_slice(&k);
            gnb_ciphertext =
                Some(pke_encrypt(&gnb_key, &k, rng).map_err(|_| ProtocolError::UnknownGnb)?);
            session_key = Some(k);
        }
        let ciphertext = pke_encrypt(&request.enc_key, &plaintext, rng)
            .map_err(|_| ProtocolError::DecryptFail)?;
        Ok(IssuedUid {
            m4: M4 {
                ciphertext,
                gnb_ciphertext,
            },
            report: EscrowReport {
                escrow: request.escrow,
                uid_tag,
            },
            session_key,
        })
    }

    pub fn process_m3<R: CryptoRngCore + ?Sized>(
        &mut self,
        gnb_id: &str,
        m3: &M3,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<IssuedUid, ProtocolError> {
        let request = self.accept_m3(gnb_id, m3, now)?;
        self.issue_m4(&request, now, rng)
    }

    /// Issues a UID outside any AKA run. Used to pre-populate the handover
    /// list so that it never shrinks to a handful of real users.
    pub fn issue_uid<R: CryptoRngCore + ?Sized>(
        &mut self,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<UidRecord, ProtocolError> {
        Ok(self.new_uid(now, rng)?.0)
    }

    pub fn apply_revocation(&mut self, notice: &RevocationNotice) -> Result<(), ProtocolError> {
        if self.params.is_none() {
            return Err(ProtocolError::NotSetUp);
        }
        if !self.aka_list.contains(&notice.pid_tag)
            || notice.uid_tags.iter().any(|t| !self.ho_list.contains(t))
        {
            return Err(ProtocolError::UnknownTag);
        }
        self.aka_list
            .remove(&notice.pid_tag)
            .map_err(|_| ProtocolError::UnknownTag)?;
        for t in &notice.uid_tags {
            self.ho_list
                .remove(t)
                .map_err(|_| ProtocolError::UnknownTag)?;
        }
        Ok(())
    }
}

/// Copies the CN's current handover list (and proof parameters) to a gNB.
pub fn sync_handover_list(cn: &Cn, gnb: &mut Gnb) -> Result<(), ProtocolError> {
    gnb.install_ho(cn.ho_params()?)
}
