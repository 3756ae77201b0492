//! Ed25519 behind a small fixed-size API.

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use rand_core::CryptoRngCore;

use super::CryptoError;

#[derive(Clone)]
pub struct SigKeyPair {
    signing: SigningKey,
}

impl SigKeyPair {
    pub fn generate<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self {
            signing: SigningKey::from_bytes(&seed),
        }
    }

    pub fn verify_key(&self) -> VerifyKey {
        VerifyKey(self.signing.verifying_key().to_bytes())
    }

    pub fn sign(&self, msg: &[u8]) -> Signature {
        Signature(self.signing.sign(msg).to_bytes())
    }
}

impl std::fmt::Debug for SigKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigKeyPair")
            .field("verify_key", &self.verify_key())
            .finish_non_exhaustive()
    }
}

/// Public verification key as its 32-byte encoding. Parsing is deferred to
/// [`verify`] so that keys received off the wire round-trip bit-exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VerifyKey(pub [u8; 32]);

impl VerifyKey {
    pub const ENCODED_LEN: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        bytes
            .try_into()
            .map(VerifyKey)
            .map_err(|_| CryptoError::Malformed("verify key"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature(pub [u8; 64]);

impl Signature {
    pub const ENCODED_LEN: usize = 64;

    pub fn as_bytes(&self) -> &[u8; 64] {
        &self.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        bytes
            .try_into()
            .map(Signature)
            .map_err(|_| CryptoError::Malformed("signature"))
    }
}

pub fn verify(pk: &VerifyKey, msg: &[u8], sig: &Signature) -> Result<(), CryptoError> {
    let key = VerifyingKey::from_bytes(&pk.0).map_err(|_| CryptoError::BadSignature)?;
    let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
    key.verify_strict(msg, &sig)
        .map_err(|_| CryptoError::BadSignature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::{RngCore, SeedableRng};

    #[test]
    fn empty_message_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let kp = SigKeyPair::generate(&mut rng);
        let sig = kp.sign(b"");
        assert!(verify(&kp.verify_key(), b"", &sig).is_ok());
    }

    #[test]
    fn any_bit_flip_rejects() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let kp = SigKeyPair::generate(&mut rng);
        let msg = b"cell broadcast".to_vec();
        let sig = kp.sign(&msg);
        for bit in 0..msg.len() * 8 {
            let mut m = msg.clone();
            m[bit / 8] ^= 1 << (bit % 8);
            assert!(verify(&kp.verify_key(), &m, &sig).is_err());
        }
        for bit in 0..512 {
            let mut s = sig;
            s.0[bit / 8] ^= 1 << (bit % 8);
            assert!(verify(&kp.verify_key(), &msg, &s).is_err());
        }
    }

    #[test]
    fn random_forgeries_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let msg = b"fixed target";
        let mut accepts = 0;
        for _ in 0..1000 {
            let mut pk = [0u8; 32];
            let mut sig = [0u8; 64];
            rng.fill_bytes(&mut pk);
            rng.fill_bytes(&mut sig);
            if verify(&VerifyKey(pk), msg, &Signature(sig)).is_ok() {
                accepts += 1;
            }
        }
        assert_eq!(accepts, 0);
    }
}
