//! Hybrid public-key encryption: ephemeral Ristretto Diffie-Hellman, HKDF-SHA256
//! and ChaCha20-Poly1305.
//!
//! Ciphertext layout: `ephemeral point (32) ‖ AEAD ciphertext ‖ tag (16)`.
//! Key and nonce are both derived from the shared point, salted with the
//! ephemeral and recipient keys, so every ciphertext uses a fresh key.

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::RistrettoPoint;
use curve25519_dalek::scalar::Scalar;
use hkdf::Hkdf;
use rand_core::CryptoRngCore;
use sha2::Sha256;
use zeroize::{Zeroize, ZeroizeOnDrop};

use super::encoding::{decode_point, random_scalar};
use super::CryptoError;

/// Bytes a ciphertext adds on top of its plaintext.
pub const PKE_OVERHEAD: usize = 32 + 16;

const KDF_INFO: &[u8] = b"mvno-aka/pke/v1";

#[derive(Clone, Zeroize, ZeroizeOnDrop)]
pub struct DecryptionKey(Scalar);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EncryptionKey(pub [u8; 32]);

impl EncryptionKey {
    pub const ENCODED_LEN: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let point = decode_point(bytes).map_err(|_| CryptoError::Malformed("encryption key"))?;
        Ok(Self(point.compress().to_bytes()))
    }
}

#[derive(Clone)]
pub struct EncKeyPair {
    dec: DecryptionKey,
    enc: EncryptionKey,
}

impl EncKeyPair {
    pub fn generate<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        let sk = random_scalar(rng);
        let pk = (&sk * RISTRETTO_BASEPOINT_TABLE).compress().to_bytes();
        Self {
            dec: DecryptionKey(sk),
            enc: EncryptionKey(pk),
        }
    }

    pub fn encryption_key(&self) -> &EncryptionKey {
        &self.enc
    }

    pub fn decryption_key(&self) -> &DecryptionKey {
        &self.dec
    }
}

impl std::fmt::Debug for EncKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EncKeyPair")
            .field("enc", &self.enc)
            .finish_non_exhaustive()
    }
}

fn derive(shared: &RistrettoPoint, eph: &[u8; 32], recipient: &[u8; 32]) -> (Key, Nonce) {
    let mut salt = [0u8; 64];
    salt[..32].copy_from_slice(eph);
    salt[32..].copy_from_slice(recipient);
    let hk = Hkdf::<Sha256>::new(Some(&salt), shared.compress().as_bytes());
    let mut okm = [0u8; 44];
    hk.expand(KDF_INFO, &mut okm)
        .expect("44 bytes is a valid HKDF-SHA256 length");
    let key = *Key::from_slice(&okm[..32]);
    let nonce = *Nonce::from_slice(&okm[32..]);
    okm.zeroize();
    (key, nonce)
}

pub fn pke_encrypt<R: CryptoRngCore + ?Sized>(
    pk: &EncryptionKey,
    msg: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>, CryptoError> {
    let recipient = decode_point(&pk.0).map_err(|_| CryptoError::Malformed("encryption key"))?;
    let eph_sk = random_scalar(rng);
    let eph = (&eph_sk * RISTRETTO_BASEPOINT_TABLE).compress().to_bytes();
    let (key, nonce) = derive(&(eph_sk * recipient), &eph, &pk.0);
    let body = ChaCha20Poly1305::new(&key)
        .encrypt(&nonce, msg)
        .map_err(|_| CryptoError::Malformed("plaintext"))?;
    let mut out = Vec::with_capacity(32 + body.len());
    out.extend_from_slice(&eph);
    out.extend_from_slice(&body);
    Ok(out)
}

pub fn pke_decrypt(sk: &DecryptionKey, ct: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if ct.len() < PKE_OVERHEAD {
        return Err(CryptoError::Decrypt);
    }
    let (eph, body) = ct.split_at(32);
    let eph_point = decode_point(eph).map_err(|_| CryptoError::Decrypt)?;
    let own = (&sk.0 * RISTRETTO_BASEPOINT_TABLE).compress().to_bytes();
    let eph: [u8; 32] = eph.try_into().expect("split at 32");
    let (key, nonce) = derive(&(sk.0 * eph_point), &eph, &own);
    ChaCha20Poly1305::new(&key)
        .decrypt(&nonce, body)
        .map_err(|_| CryptoError::Decrypt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;
    use std::collections::HashSet;

    #[test]
    fn round_trip_128_bytes() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let kp = EncKeyPair::generate(&mut rng);
        let msg: Vec<u8> = (0..128u8).collect();
        let ct = pke_encrypt(kp.encryption_key(), &msg, &mut rng).unwrap();
        assert_eq!(ct.len(), msg.len() + PKE_OVERHEAD);
        assert_eq!(pke_decrypt(kp.decryption_key(), &ct).unwrap(), msg);
    }

    #[test]
    fn wrong_key_rejects() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let a = EncKeyPair::generate(&mut rng);
        let b = EncKeyPair::generate(&mut rng);
        let ct = pke_encrypt(a.encryption_key(), b"payload", &mut rng).unwrap();
        assert_eq!(
            pke_decrypt(b.decryption_key(), &ct),
            Err(CryptoError::Decrypt)
        );
    }

    #[test]
    fn tampering_and_truncation_reject() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let kp = EncKeyPair::generate(&mut rng);
        let ct = pke_encrypt(kp.encryption_key(), b"ack", &mut rng).unwrap();
        for i in 0..ct.len() {
            let mut t = ct.clone();
            t[i] ^= 0x01;
            assert!(pke_decrypt(kp.decryption_key(), &t).is_err(), "byte {i}");
        }
        assert!(pke_decrypt(kp.decryption_key(), &ct[..ct.len() - 1]).is_err());
        assert!(pke_decrypt(kp.decryption_key(), &[]).is_err());
    }

    #[test]
    fn encryption_is_randomized() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let kp = EncKeyPair::generate(&mut rng);
        let seen: HashSet<Vec<u8>> = (0..100)
            .map(|_| pke_encrypt(kp.encryption_key(), b"same", &mut rng).unwrap())
            .collect();
        assert_eq!(seen.len(), 100);
    }
}
