//! Key-exposure-free chameleon hash over Ristretto.
//!
//! Public key `Y = x·B`. Randomness is a pair `(R, s)` and
//!
//! ```text
//! CH(m; R, s) = R − e·Y − s·B,   e = H(Y, m, R)
//! ```
//!
//! With the trapdoor `x`, a collision for digest `h` and any new message `m'`
//! is `R' = h + k·B`, `s' = k − e'·x` for fresh `k`. Each collision is a
//! Schnorr signature under `Y`, so publishing any number of collisions does
//! not leak `x`. The discrete-log variant `m·B + r·Y` would give `x` away after
//! two sanitizations of the same block.

use curve25519_dalek::constants::{RISTRETTO_BASEPOINT_POINT, RISTRETTO_BASEPOINT_TABLE};
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::VartimeMultiscalarMul;
use rand_core::CryptoRngCore;
use zeroize::{Zeroize, ZeroizeOnDrop};

use super::encoding::{decode_point, decode_scalar, encode_scalar, hash_to_scalar, random_scalar};
use super::CryptoError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChameleonPublicKey {
    point: RistrettoPoint,
    compressed: CompressedRistretto,
}

impl ChameleonPublicKey {
    pub const ENCODED_LEN: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        self.compressed.as_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let point = decode_point(bytes).map_err(|_| CryptoError::Malformed("chameleon key"))?;
        Ok(Self {
            point,
            compressed: point.compress(),
        })
    }
}

#[derive(Clone, Zeroize, ZeroizeOnDrop)]
pub struct ChameleonKeyPair {
    trapdoor: Scalar,
    #[zeroize(skip)]
    public: ChameleonPublicKey,
}

impl ChameleonKeyPair {
    pub fn generate<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        let trapdoor = random_scalar(rng);
        let point = &trapdoor * RISTRETTO_BASEPOINT_TABLE;
        Self {
            trapdoor,
            public: ChameleonPublicKey {
                point,
                compressed: point.compress(),
            },
        }
    }

    pub fn public(&self) -> &ChameleonPublicKey {
        &self.public
    }
}

impl std::fmt::Debug for ChameleonKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChameleonKeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChameleonRandomness {
    commit: CompressedRistretto,
    response: Scalar,
}

impl ChameleonRandomness {
    pub const ENCODED_LEN: usize = 64;

    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(self.commit.as_bytes());
        out[32..].copy_from_slice(&encode_scalar(&self.response));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(CryptoError::Malformed("chameleon randomness"));
        }
        let commit = decode_point(&bytes[..32])?.compress();
        let response = decode_scalar(&bytes[32..])?;
        Ok(Self { commit, response })
    }
}

fn challenge(pk: &ChameleonPublicKey, msg: &[u8], commit: &CompressedRistretto) -> Scalar {
    hash_to_scalar(
        "mvno-aka/chameleon-hash",
        &[pk.as_bytes(), msg, commit.as_bytes()],
    )
}

/// Fresh randomness for hashing without the trapdoor.
pub fn ch_randomness<R: CryptoRngCore + ?Sized>(rng: &mut R) -> ChameleonRandomness {
    let k = random_scalar(rng);
    ChameleonRandomness {
        commit: (&k * RISTRETTO_BASEPOINT_TABLE).compress(),
        response: random_scalar(rng),
    }
}

pub fn ch_hash(
    pk: &ChameleonPublicKey,
    msg: &[u8],
    rand: &ChameleonRandomness,
) -> Result<[u8; 32], CryptoError> {
    let r = rand
        .commit
        .decompress()
        .ok_or(CryptoError::Malformed("chameleon randomness"))?;
    let e = challenge(pk, msg, &rand.commit);
    let sub = RistrettoPoint::vartime_multiscalar_mul(
        [e, rand.response],
        [pk.point, RISTRETTO_BASEPOINT_POINT],
    );
    Ok((r - sub).compress().to_bytes())
}

/// Randomness under which `new_msg` hashes to `digest`.
pub fn ch_collide<R: CryptoRngCore + ?Sized>(
    keys: &ChameleonKeyPair,
    digest: &[u8; 32],
    new_msg: &[u8],
    rng: &mut R,
) -> Result<ChameleonRandomness, CryptoError> {
    let h = decode_point(digest)?;
    let k = random_scalar(rng);
    let commit = (h + &k * RISTRETTO_BASEPOINT_TABLE).compress();
    let e = challenge(&keys.public, new_msg, &commit);
    Ok(ChameleonRandomness {
        commit,
        response: k - e * keys.trapdoor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    #[test]
    fn collision_with_trapdoor() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let kp = ChameleonKeyPair::generate(&mut rng);
        let r = ch_randomness(&mut rng);
        let h = ch_hash(kp.public(), b"gnb-1|t0", &r).unwrap();
        for msg in [&b"gnb-1|t1"[..], b"gnb-1|t2", b""] {
            let r2 = ch_collide(&kp, &h, msg, &mut rng).unwrap();
            assert_eq!(ch_hash(kp.public(), msg, &r2).unwrap(), h);
        }
    }

    #[test]
    fn different_message_same_randomness_differs() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let kp = ChameleonKeyPair::generate(&mut rng);
        let r = ch_randomness(&mut rng);
        assert_ne!(
            ch_hash(kp.public(), b"a", &r).unwrap(),
            ch_hash(kp.public(), b"b", &r).unwrap()
        );
    }

    #[test]
    fn collision_under_foreign_key_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let kp = ChameleonKeyPair::generate(&mut rng);
        let other = ChameleonKeyPair::generate(&mut rng);
        let r = ch_randomness(&mut rng);
        let h = ch_hash(kp.public(), b"m", &r).unwrap();
        let r2 = ch_collide(&other, &h, b"m'", &mut rng).unwrap();
        assert_ne!(ch_hash(kp.public(), b"m'", &r2).unwrap(), h);
    }

    #[test]
    fn randomness_encoding() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let r = ch_randomness(&mut rng);
        assert_eq!(ChameleonRandomness::from_bytes(&r.to_bytes()).unwrap(), r);
    }
}
