use std::collections::BTreeMap;

use rand_core::CryptoRngCore;

use super::{GnbCertificate, ProtocolError, Timestamp};
use crate::primitives::{
    ChameleonKeyPair, ChameleonPublicKey, EncKeyPair, EncryptionKey, SigKeyPair, VerifyKey,
};

/// Key material the MNO hands its core network.
#[derive(Clone, Debug)]
pub struct CnKeyBundle {
    /// `ssk_CN`, signs UID records.
    pub signing: SigKeyPair,
    /// SanSig signer key `sk_sig^CN`, certifies gNBs.
    pub sansig_signer: SigKeyPair,
}

impl CnKeyBundle {
    pub fn public(&self) -> CnPublic {
        CnPublic {
            spk: self.signing.verify_key(),
            sansig_pk: self.sansig_signer.verify_key(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnPublic {
    pub spk: VerifyKey,
    pub sansig_pk: VerifyKey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GnbPublic {
    pub sanitizer_key: ChameleonPublicKey,
    pub verify_key: VerifyKey,
    pub enc_key: EncryptionKey,
}

/// Public keys of the operator's network, as distributed to the MVNO and from
/// there to UEs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetworkDirectory {
    pub cn: Option<CnPublic>,
    pub gnbs: BTreeMap<String, GnbPublic>,
}

/// Everything a freshly registered base station starts with.
#[derive(Clone, Debug)]
pub struct GnbProvision {
    pub id: String,
    pub sanitizer: ChameleonKeyPair,
    pub signing: SigKeyPair,
    pub enc: EncKeyPair,
    pub certificate: GnbCertificate,
    pub cn: CnPublic,
}

impl GnbProvision {
    pub fn public(&self) -> GnbPublic {
        GnbPublic {
            sanitizer_key: *self.sanitizer.public(),
            verify_key: self.signing.verify_key(),
            enc_key: *self.enc.encryption_key(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Mno {
    cn: Option<CnPublic>,
    sansig_signer: Option<SigKeyPair>,
    gnbs: BTreeMap<String, GnbPublic>,
}

impl Mno {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn setup_cn<R: CryptoRngCore + ?Sized>(
        &mut self,
        rng: &mut R,
    ) -> Result<CnKeyBundle, ProtocolError> {
        if self.cn.is_some() {
            return Err(ProtocolError::DoubleSetup);
        }
        let bundle = CnKeyBundle {
            signing: SigKeyPair::generate(rng),
            sansig_signer: SigKeyPair::generate(rng),
        };
        self.cn = Some(bundle.public());
        self.sansig_signer = Some(bundle.sansig_signer.clone());
        Ok(bundle)
    }

    pub fn cn_public(&self) -> Option<CnPublic> {
        self.cn
    }

    pub fn register_gnb<R: CryptoRngCore + ?Sized>(
        &mut self,
        id: &str,
        location: &[u8],
        expiry: Timestamp,
        now: Timestamp,
        rng: &mut R,
    ) -> Result<GnbProvision, ProtocolError> {
        let (Some(cn), Some(signer)) = (self.cn, self.sansig_signer.as_ref()) else {
            return Err(ProtocolError::NotSetUp);
        };
        if self.gnbs.contains_key(id) {
            return Err(ProtocolError::DuplicateGnb);
        }
        if expiry <= now {
            return Err(ProtocolError::ExpiredExp);
        }
        let sanitizer = ChameleonKeyPair::generate(rng);
        let certificate =
            GnbCertificate::issue(location, expiry, id, now, signer, sanitizer.public(), rng)
                .map_err(|_| ProtocolError::BadCertificate)?;
        let provision = GnbProvision {
            id: id.to_owned(),
            sanitizer,
            signing: SigKeyPair::generate(rng),
            enc: EncKeyPair::generate(rng),
            certificate,
            cn,
        };
        self.gnbs.insert(id.to_owned(), provision.public());
        Ok(provision)
    }

    pub fn directory(&self) -> NetworkDirectory {
        NetworkDirectory {
            cn: self.cn,
            gnbs: self.gnbs.clone(),
        }
    }
}
