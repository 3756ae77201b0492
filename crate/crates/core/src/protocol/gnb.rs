use rand_core::CryptoRngCore;

use super::messages::{replay_key, HO_ACK_LABEL, M2_LABEL, M3_LABEL};
use super::{
    check_fresh, ho_context, CnPublic, GnbCertificate, GnbProvision, GnbPublic, HoM2, HoM3,
    HoParams, ProtocolConfig, ProtocolError, ReplayCache, Timestamp, M1, M2, M3, M4,
};
use crate::primitives::{
    pke_decrypt, pke_encrypt, verify, ChameleonKeyPair, EncKeyPair, SigKeyPair,
};
use crate::zk::{verify_membership, AuthorizedList};

pub struct Gnb {
    id: String,
    sanitizer: ChameleonKeyPair,
    signing: SigKeyPair,
    enc: EncKeyPair,
    certificate: GnbCertificate,
    cn: CnPublic,
    config: ProtocolConfig,
    m2_seen: ReplayCache,
    ho_seen: ReplayCache,
    ho: Option<HoParams>,
}

impl std::fmt::Debug for Gnb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gnb")
            .field("id", &self.id)
            .finish_non_exhaustive()
    }
}

impl Gnb {
    pub fn new(provision: GnbProvision, config: ProtocolConfig) -> Self {
        Self {
            id: provision.id.clone(),
            sanitizer: provision.sanitizer.clone(),
            signing: provision.signing.clone(),
            enc: provision.enc.clone(),
            certificate: provision.certificate.clone(),
            cn: provision.cn,
            m2_seen: ReplayCache::new(config.replay_cache_size),
            ho_seen: ReplayCache::new(config.replay_cache_size),
            config,
            ho: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn certificate(&self) -> &GnbCertificate {
        &self.certificate
    }

    pub fn public(&self) -> GnbPublic {
        GnbPublic {
            sanitizer_key: *self.sanitizer.public(),
            verify_key: self.signing.verify_key(),
            enc_key: *self.enc.encryption_key(),
        }
    }

    pub fn ho_list(&self) -> Option<&AuthorizedList> {
        self.ho.as_ref().map(|h| &h.list)
    }

    /// Step 1: re-stamps the certificate's modifiable block with
    /// `id ‖ now` and broadcasts it.
    pub fn make_m1<R: CryptoRngCore + ?Sized>(
        &self,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<M1, ProtocolError> {
        if self.certificate.expiry() <= now {
            return Err(ProtocolError::ExpiredCertificate);
        }
        let certificate = self
            .certificate
            .sanitize(&self.id, now, &self.cn.sansig_pk, &self.sanitizer, rng)
            .map_err(|_| ProtocolError::BadCertificate)?;
        Ok(M1 { certificate })
    }

    pub fn accept_m2(&mut self, m2: &M2, now: Timestamp) -> Result<(), ProtocolError> {
        check_fresh(m2.timestamp, now, &self.config)?;
        let payload = &m2.payload;
        verify(
            &payload.verify_key,
            &payload.signed_bytes(M2_LABEL, m2.timestamp),
            &m2.signature,
        )
        .map_err(|_| ProtocolError::BadSignature)?;
        if !self
            .m2_seen
            .insert(replay_key(&payload.commitment, &payload.enc_key))
        {
            return Err(ProtocolError::DuplicateMessage);
        }
        Ok(())
    }

    /// Countersigns an accepted `M2` for the CN.
    pub fn make_m3(&self, m2: &M2, now: Timestamp) -> M3 {
        let signature = self.signing.sign(&m2.payload.signed_bytes(M3_LABEL, now));
        M3 {
            payload: m2.payload.clone(),
            timestamp: now,
            signature,
        }
    }

    pub fn process_m2(&mut self, m2: &M2, now: Timestamp) -> Result<M3, ProtocolError> {
        self.accept_m2(m2, now)?;
        Ok(self.make_m3(m2, now))
    }

    /// Takes this gNB's copy of the session key out of `M4` (if any) and
    /// returns the message to forward to the UE.
    pub fn relay_m4(&self, m4: &M4) -> Result<(M4, Option<[u8; 32]>), ProtocolError> {
        let key = match &m4.gnb_ciphertext {
            None => None,
            Some(ct) => {
                let k = pke_decrypt(self.enc.decryption_key(), ct)
                    .map_err(|_| ProtocolError::DecryptFail)?;
                Some(k.try_into().map_err(|_| ProtocolError::DecryptFail)?)
            }
        };
        let forward = M4 {
            ciphertext: m4.ciphertext.clone(),
            gnb_ciphertext: None,
        };
        Ok((forward, key))
    }

    pub fn install_ho(&mut self, params: HoParams) -> Result<(), ProtocolError> {
        if let Some(current) = &self.ho {
            if params.list.version() < current.list.version() {
                return Err(ProtocolError::VersionRegression);
            }
        }
        self.ho = Some(params);
        Ok(())
    }

    /// Verifies a handover request against the locally held UID list. No CN
    /// involvement.
    pub fn ho_accept_m2(&mut self, m2: &HoM2, now: Timestamp) -> Result<(), ProtocolError> {
        let ho = self.ho.as_ref().ok_or(ProtocolError::NotSetUp)?;
        check_fresh(m2.timestamp, now, &self.config)?;
        verify(&m2.verify_key, &m2.signed_bytes(), &m2.signature)
            .map_err(|_| ProtocolError::BadSignature)?;
        let key = replay_key(&m2.commitment, &m2.enc_key);
        if self.ho_seen.contains(&key) {
            return Err(ProtocolError::DuplicateMessage);
        }
        verify_membership(
            &ho.crs,
            &ho.ck,
            &m2.commitment,
            &ho.list,
            &ho_context(&m2.keys()),
            &m2.proof,
        )
        .map_err(|_| ProtocolError::BadProof)?;
        self.ho_seen.insert(key);
        Ok(())
    }

    /// Encrypts `ACK ‖ σ` to the UE, where `ACK` is this gNB's signature on
    /// the UE's `σ`.
    pub fn ho_make_m3<R: CryptoRngCore + ?Sized>(
        &self,
        m2: &HoM2,
        rng: &mut R,
    ) -> Result<HoM3, ProtocolError> {
        let ack = self
            .signing
            .sign(&[HO_ACK_LABEL, m2.signature.as_bytes().as_slice()].concat());
        let plaintext = [
            ack.as_bytes().as_slice(),
            m2.signature.as_bytes().as_slice(),
        ]
        .concat();
        let ciphertext =
            pke_encrypt(&m2.enc_key, &plaintext, rng).map_err(|_| ProtocolError::DecryptFail)?;
        Ok(HoM3 { ciphertext })
    }

    pub fn process_ho_m2<R: CryptoRngCore + ?Sized>(
        &mut self,
        m2: &HoM2,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<HoM3, ProtocolError> {
        self.ho_accept_m2(m2, now)?;
        self.ho_make_m3(m2, rng)
    }
}
