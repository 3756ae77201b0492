use rand_core::CryptoRngCore;

use super::Timestamp;
use crate::primitives::{
    sansig_sanit, sansig_sign, sansig_verify, AdmPolicy, ChameleonKeyPair, ChameleonPublicKey,
    CryptoError, SanSigSignature, SigKeyPair, VerifyKey,
};

/// Base-station certificate signed with a sanitizable signature.
///
/// Three blocks: `location`, `expiry` (8-byte BE ms) and the modifiable part
/// `len(id) (2) ‖ id ‖ stamp (8)`. The MNO signs with the CN's SanSig signer
/// key; the gNB re-stamps the modifiable block before every broadcast.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnbCertificate {
    location: Vec<u8>,
    expiry: Timestamp,
    gnb_id: String,
    stamp: Timestamp,
    signature: SanSigSignature,
}

pub(crate) const MODIFIABLE_BLOCK: usize = 2;

fn modifiable_block(gnb_id: &str, stamp: Timestamp) -> Vec<u8> {
    let id = gnb_id.as_bytes();
    let mut out = Vec::with_capacity(2 + id.len() + 8);
    out.extend_from_slice(&(id.len() as u16).to_be_bytes());
    out.extend_from_slice(id);
    out.extend_from_slice(&stamp.to_bytes());
    out
}

fn blocks(location: &[u8], expiry: Timestamp, gnb_id: &str, stamp: Timestamp) -> Vec<Vec<u8>> {
    vec![
        location.to_vec(),
        expiry.to_bytes().to_vec(),
        modifiable_block(gnb_id, stamp),
    ]
}

impl GnbCertificate {
    pub(crate) fn issue<R: CryptoRngCore + ?Sized>(
        location: &[u8],
        expiry: Timestamp,
        gnb_id: &str,
        stamp: Timestamp,
        signer: &SigKeyPair,
        pk_san: &ChameleonPublicKey,
        rng: &mut R,
    ) -> Result<Self, CryptoError> {
        let adm = AdmPolicy::new([MODIFIABLE_BLOCK]);
        let signature = sansig_sign(
            &blocks(location, expiry, gnb_id, stamp),
            signer,
            pk_san,
            &adm,
            rng,
        )?;
        Ok(Self {
            location: location.to_vec(),
            expiry,
            gnb_id: gnb_id.to_owned(),
            stamp,
            signature,
        })
    }

    /// Reassembles a certificate received off the wire. Nothing is checked
    /// until [`GnbCertificate::verify`].
    pub fn from_parts(
        location: Vec<u8>,
        expiry: Timestamp,
        gnb_id: String,
        stamp: Timestamp,
        signature: SanSigSignature,
    ) -> Self {
        Self {
            location,
            expiry,
            gnb_id,
            stamp,
            signature,
        }
    }

    pub fn location(&self) -> &[u8] {
        &self.location
    }

    pub fn expiry(&self) -> Timestamp {
        self.expiry
    }

    pub fn gnb_id(&self) -> &str {
        &self.gnb_id
    }

    pub fn stamp(&self) -> Timestamp {
        self.stamp
    }

    pub fn signature(&self) -> &SanSigSignature {
        &self.signature
    }

    pub fn blocks(&self) -> Vec<Vec<u8>> {
        blocks(&self.location, self.expiry, &self.gnb_id, self.stamp)
    }

    /// Replaces the modifiable block with `gnb_id ‖ stamp`.
    pub fn sanitize<R: CryptoRngCore + ?Sized>(
        &self,
        gnb_id: &str,
        stamp: Timestamp,
        pk_sig: &VerifyKey,
        sanitizer: &ChameleonKeyPair,
        rng: &mut R,
    ) -> Result<Self, CryptoError> {
        let modification = vec![(MODIFIABLE_BLOCK, modifiable_block(gnb_id, stamp))];
        let (_, signature) = sansig_sanit(
            &self.blocks(),
            &modification,
            &self.signature,
            pk_sig,
            sanitizer,
            rng,
        )?;
        Ok(Self {
            location: self.location.clone(),
            expiry: self.expiry,
            gnb_id: gnb_id.to_owned(),
            stamp,
            signature,
        })
    }

    pub fn verify(
        &self,
        pk_sig: &VerifyKey,
        pk_san: &ChameleonPublicKey,
    ) -> Result<(), CryptoError> {
        let adm = self.signature.adm();
        if adm.len() != 1 || !adm.contains(MODIFIABLE_BLOCK) {
            return Err(CryptoError::BadSignature);
        }
        sansig_verify(&self.blocks(), &self.signature, pk_sig, pk_san)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    #[test]
    fn restamp_keeps_fixed_part_and_verifies() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let signer = SigKeyPair::generate(&mut rng);
        let san = ChameleonKeyPair::generate(&mut rng);
        let cert = GnbCertificate::issue(
            b"cell-7",
            Timestamp(1_000_000),
            "gnb-7",
            Timestamp(0),
            &signer,
            san.public(),
            &mut rng,
        )
        .unwrap();
        cert.verify(&signer.verify_key(), san.public()).unwrap();
        let a = cert
            .sanitize("gnb-7", Timestamp(10), &signer.verify_key(), &san, &mut rng)
            .unwrap();
        let b = cert
            .sanitize("gnb-7", Timestamp(20), &signer.verify_key(), &san, &mut rng)
            .unwrap();
        a.verify(&signer.verify_key(), san.public()).unwrap();
        b.verify(&signer.verify_key(), san.public()).unwrap();
        assert_eq!(a.blocks()[..2], b.blocks()[..2]);
        assert_ne!(a.blocks()[2], b.blocks()[2]);
        assert_ne!(a.signature(), b.signature());

        let mut moved = a.clone();
        moved.location = b"cell-8".to_vec();
        assert!(moved.verify(&signer.verify_key(), san.public()).is_err());
        let mut extended = a.clone();
        extended.expiry = Timestamp(2_000_000);
        assert!(extended.verify(&signer.verify_key(), san.public()).is_err());
    }
}
