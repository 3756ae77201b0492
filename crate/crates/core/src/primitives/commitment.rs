use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::MultiscalarMul;
use rand_core::CryptoRngCore;

use super::encoding::{decode_point, digest, hash_to_point};
use super::CryptoError;

/// Pedersen commitment key `(G, H)`.
///
/// `G` is always the Ristretto basepoint, the same base identity tags are
/// built on, which is what lets the membership proof relate a commitment to a
/// list entry. `H` is hashed onto the group so nobody knows `log_G(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentKey {
    g: RistrettoPoint,
    h: RistrettoPoint,
}

impl CommitmentKey {
    pub const ENCODED_LEN: usize = 64;

    pub fn derive(seed: &[u8]) -> Self {
        Self {
            g: RISTRETTO_BASEPOINT_POINT,
            h: hash_to_point("mvno-aka/commitment-key/h", &[seed]),
        }
    }

    pub fn random<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self::derive(&seed)
    }

    pub fn generators(&self) -> [RistrettoPoint; 2] {
        [self.g, self.h]
    }

    pub fn g(&self) -> &RistrettoPoint {
        &self.g
    }

    pub fn h(&self) -> &RistrettoPoint {
        &self.h
    }

    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(self.g.compress().as_bytes());
        out[32..].copy_from_slice(self.h.compress().as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(CryptoError::Malformed("commitment key"));
        }
        let g = decode_point(&bytes[..32])?;
        let h = decode_point(&bytes[32..])?;
        if g != RISTRETTO_BASEPOINT_POINT || h == g {
            return Err(CryptoError::Malformed("commitment key"));
        }
        Ok(Self { g, h })
    }

    pub fn digest(&self) -> [u8; 32] {
        digest("mvno-aka/commitment-key", &[&self.to_bytes()])
    }
}

/// A commitment value. The opening `(m, r)` is held separately by whoever
/// created it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Commitment {
    point: RistrettoPoint,
    compressed: CompressedRistretto,
}

impl Commitment {
    pub const ENCODED_LEN: usize = 32;

    pub fn from_point(point: RistrettoPoint) -> Self {
        Self {
            point,
            compressed: point.compress(),
        }
    }

    pub fn point(&self) -> &RistrettoPoint {
        &self.point
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.compressed.to_bytes()
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        self.compressed.as_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        decode_point(bytes)
            .map(Self::from_point)
            .map_err(|_| CryptoError::Malformed("commitment"))
    }
}

/// `m·G + r·H`.
pub fn commit(ck: &CommitmentKey, m: &Scalar, r: &Scalar) -> Commitment {
    Commitment::from_point(RistrettoPoint::multiscalar_mul([m, r], [ck.g, ck.h]))
}

/// Returns `m` if `(m, r)` opens `c`.
pub fn decommit(
    ck: &CommitmentKey,
    c: &Commitment,
    m: &Scalar,
    r: &Scalar,
) -> Result<Scalar, CryptoError> {
    if commit(ck, m, r).point == c.point {
        Ok(*m)
    } else {
        Err(CryptoError::OpeningMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::random_scalar;
    use curve25519_dalek::traits::Identity;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn key() -> CommitmentKey {
        CommitmentKey::derive(b"commitment-tests")
    }

    #[test]
    fn zero_opening_is_identity() {
        let c = commit(&key(), &Scalar::ZERO, &Scalar::ZERO);
        assert_eq!(*c.point(), RistrettoPoint::identity());
    }

    #[test]
    fn round_trip_and_binding() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let ck = key();
        let r = random_scalar(&mut rng);
        let c = commit(&ck, &Scalar::from(7u8), &r);
        assert_eq!(
            decommit(&ck, &c, &Scalar::from(7u8), &r),
            Ok(Scalar::from(7u8))
        );
        assert_eq!(
            decommit(&ck, &c, &Scalar::from(8u8), &r),
            Err(CryptoError::OpeningMismatch)
        );
    }

    #[test]
    fn exactly_one_toy_message_opens() {
        let ck = key();
        let r = Scalar::from(11u8);
        for m in 0u8..16 {
            let c = commit(&ck, &Scalar::from(m), &r);
            let accepted: Vec<u8> = (0u8..16)
                .filter(|m2| decommit(&ck, &c, &Scalar::from(*m2), &r).is_ok())
                .collect();
            assert_eq!(accepted, vec![m]);
        }
    }

    #[test]
    fn fresh_randomness_gives_fresh_values() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let ck = key();
        for _ in 0..100 {
            let r1 = random_scalar(&mut rng);
            let r2 = random_scalar(&mut rng);
            assert_ne!(
                commit(&ck, &Scalar::from(5u8), &r1),
                commit(&ck, &Scalar::from(5u8), &r2)
            );
        }
    }

    #[test]
    fn key_encoding() {
        let ck = key();
        assert_eq!(CommitmentKey::from_bytes(&ck.to_bytes()).unwrap(), ck);
        let mut swapped = ck.to_bytes();
        swapped.rotate_left(32);
        assert!(CommitmentKey::from_bytes(&swapped).is_err());
        assert_ne!(CommitmentKey::derive(b"a"), CommitmentKey::derive(b"b"));
    }
}
