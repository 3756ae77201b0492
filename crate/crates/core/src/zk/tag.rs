use std::sync::OnceLock;

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;

use crate::primitives::{decode_point, hash_to_point, hash_to_scalar, CryptoError};

/// Public one-way tag of an identity scalar: `x·B + O`, where `B` is the
/// Ristretto basepoint (the commitment key's `G`) and `O` a hashed domain
/// offset so that no tag is the identity element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityTag {
    point: RistrettoPoint,
    compressed: CompressedRistretto,
}

impl IdentityTag {
    pub const ENCODED_LEN: usize = 32;

    pub fn point(&self) -> &RistrettoPoint {
        &self.point
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        self.compressed.as_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let point = decode_point(bytes).map_err(|_| CryptoError::Malformed("identity tag"))?;
        Ok(Self::from_point(point))
    }

    pub(crate) fn from_point(point: RistrettoPoint) -> Self {
        Self {
            point,
            compressed: point.compress(),
        }
    }
}

impl std::hash::Hash for IdentityTag {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.as_bytes().hash(state);
    }
}

impl PartialOrd for IdentityTag {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IdentityTag {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_bytes().cmp(other.as_bytes())
    }
}

pub(crate) fn tag_offset() -> &'static RistrettoPoint {
    static OFFSET: OnceLock<RistrettoPoint> = OnceLock::new();
    OFFSET.get_or_init(|| hash_to_point("mvno-aka/identity-tag/offset", &[]))
}

pub fn make_tag(identity: &Scalar) -> IdentityTag {
    IdentityTag::from_point(identity * RISTRETTO_BASEPOINT_TABLE + tag_offset())
}

/// Maps an identity byte string (a UID) to the scalar its tag and
/// commitments are computed over.
pub fn identity_scalar(label: &str, bytes: &[u8]) -> Scalar {
    hash_to_scalar("mvno-aka/identity-scalar", &[label.as_bytes(), bytes])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn deterministic() {
        let x = Scalar::from(99u8);
        assert_eq!(make_tag(&x), make_tag(&x));
    }

    #[test]
    fn injective_on_toy_scalars() {
        let tags: HashSet<[u8; 32]> = (0u8..16)
            .map(|i| *make_tag(&Scalar::from(i)).as_bytes())
            .collect();
        assert_eq!(tags.len(), 16);
    }

    #[test]
    fn zero_tag_is_the_offset() {
        assert_eq!(make_tag(&Scalar::ZERO).point(), tag_offset());
        assert_eq!(
            hex::encode(make_tag(&Scalar::ZERO).as_bytes()),
            include_str!("../../tests/golden/tag_zero.hex").trim()
        );
    }
}
