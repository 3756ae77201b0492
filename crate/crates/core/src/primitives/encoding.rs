use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use rand_core::CryptoRngCore;
use sha2::{Digest, Sha256, Sha512};

use super::CryptoError;

fn absorb<D: Digest>(hasher: &mut D, domain: &str, parts: &[&[u8]]) {
    hasher.update((domain.len() as u64).to_be_bytes());
    hasher.update(domain.as_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part);
    }
}

/// Domain-separated SHA-512 reduced to a scalar. Parts are length-prefixed so
/// distinct part lists never collide by concatenation.
pub fn hash_to_scalar(domain: &str, parts: &[&[u8]]) -> Scalar {
    let mut h = Sha512::new();
    absorb(&mut h, domain, parts);
    Scalar::from_hash(h)
}

/// Domain-separated hash onto the group. The output has no known discrete-log
/// relation to any other generator.
pub fn hash_to_point(domain: &str, parts: &[&[u8]]) -> RistrettoPoint {
    let mut h = Sha512::new();
    absorb(&mut h, domain, parts);
    RistrettoPoint::from_hash(h)
}

/// Domain-separated SHA-256.
pub fn digest(domain: &str, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    absorb(&mut h, domain, parts);
    h.finalize().into()
}

pub fn random_scalar<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Scalar {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    Scalar::from_bytes_mod_order_wide(&wide)
}

/// Fixed-width big-endian scalar encoding.
pub fn encode_scalar(s: &Scalar) -> [u8; 32] {
    let mut b = s.to_bytes();
    b.reverse();
    b
}

/// Inverse of [`encode_scalar`]; rejects values at or above the group order.
pub fn decode_scalar(bytes: &[u8]) -> Result<Scalar, CryptoError> {
    let mut le: [u8; 32] = bytes
        .try_into()
        .map_err(|_| CryptoError::Malformed("scalar"))?;
    le.reverse();
    Option::from(Scalar::from_canonical_bytes(le)).ok_or(CryptoError::Malformed("scalar"))
}

pub fn decode_point(bytes: &[u8]) -> Result<RistrettoPoint, CryptoError> {
    CompressedRistretto::from_slice(bytes)
        .ok()
        .and_then(|c| c.decompress())
        .ok_or(CryptoError::Malformed("group element"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_encoding_is_big_endian() {
        let b = encode_scalar(&Scalar::from(0x0102u64));
        assert_eq!(b[30..], [0x01, 0x02]);
        assert!(b[..30].iter().all(|&x| x == 0));
        assert_eq!(decode_scalar(&b).unwrap(), Scalar::from(0x0102u64));
    }

    #[test]
    fn non_canonical_scalar_rejected() {
        assert!(decode_scalar(&[0xff; 32]).is_err());
        assert!(decode_scalar(&[0u8; 31]).is_err());
    }

    #[test]
    fn parts_are_length_prefixed() {
        assert_ne!(digest("d", &[b"ab", b"c"]), digest("d", &[b"a", b"bc"]));
        assert_ne!(digest("d1", &[b"x"]), digest("d2", &[b"x"]));
    }
}
