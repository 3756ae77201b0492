use sha2::{Digest, Sha256};
use thiserror::Error;

use super::tag::IdentityTag;
use crate::primitives::digest;

/// Longest list a membership proof can be built over (one extra branch for
/// the trapdoor and 32-byte entries in a 16-bit length-prefixed component).
pub const MAX_LIST_LEN: usize = 2046;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("tag already listed")]
    Duplicate,
    #[error("tag not listed")]
    Missing,
    #[error("list is full")]
    Full,
    #[error("malformed list encoding")]
    Malformed,
}

/// Ordered, duplicate-free list of identity tags with a version counter that
/// moves on every change.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AuthorizedList {
    entries: Vec<IdentityTag>,
    version: u32,
}

impl AuthorizedList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[IdentityTag] {
        &self.entries
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, tag: &IdentityTag) -> Option<usize> {
        self.entries.iter().position(|t| t == tag)
    }

    pub fn contains(&self, tag: &IdentityTag) -> bool {
        self.position(tag).is_some()
    }

    pub fn push(&mut self, tag: IdentityTag) -> Result<(), ListError> {
        if self.contains(&tag) {
            return Err(ListError::Duplicate);
        }
        if self.entries.len() >= MAX_LIST_LEN {
            return Err(ListError::Full);
        }
        self.entries.push(tag);
        self.version += 1;
        Ok(())
    }

    pub fn remove(&mut self, tag: &IdentityTag) -> Result<(), ListError> {
        let i = self.position(tag).ok_or(ListError::Missing)?;
        self.entries.remove(i);
        self.version += 1;
        Ok(())
    }

    /// Merkle root over the tag encodings (SHA-256, `0x00` leaf / `0x01` node
    /// prefixes, odd nodes promoted), bound to the length and version.
    pub fn digest(&self) -> [u8; 32] {
        let root = merkle_root(&self.entries);
        digest(
            "mvno-aka/authorized-list/v1",
            &[
                &self.version.to_be_bytes(),
                &(self.entries.len() as u32).to_be_bytes(),
                &root,
            ],
        )
    }

    /// `version (4) ‖ count (4) ‖ count × tag (32)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 32 * self.entries.len());
        out.extend_from_slice(&self.version.to_be_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_be_bytes());
        for t in &self.entries {
            out.extend_from_slice(t.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ListError> {
        if bytes.len() < 8 {
            return Err(ListError::Malformed);
        }
        let version = u32::from_be_bytes(bytes[..4].try_into().unwrap());
        let count = u32::from_be_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let body = &bytes[8..];
        if count > MAX_LIST_LEN || body.len() != count * 32 {
            return Err(ListError::Malformed);
        }
        let mut list = AuthorizedList::new();
        for chunk in body.chunks_exact(32) {
            let tag = IdentityTag::from_bytes(chunk).map_err(|_| ListError::Malformed)?;
            list.push(tag).map_err(|_| ListError::Malformed)?;
        }
        list.version = version;
        Ok(list)
    }
}

fn merkle_root(entries: &[IdentityTag]) -> [u8; 32] {
    if entries.is_empty() {
        return Sha256::digest(b"mvno-aka/authorized-list/empty").into();
    }
    let mut level: Vec<[u8; 32]> = entries
        .iter()
        .map(|t| {
            let mut h = Sha256::new();
            h.update([0x00]);
            h.update(t.as_bytes());
            h.finalize().into()
        })
        .collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [l, r] => {
                    let mut h = Sha256::new();
                    h.update([0x01]);
                    h.update(l);
                    h.update(r);
                    h.finalize().into()
                }
                [single] => *single,
                _ => unreachable!(),
            })
            .collect();
    }
    level[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zk::make_tag;
    use curve25519_dalek::scalar::Scalar;

    fn tag(i: u64) -> IdentityTag {
        make_tag(&Scalar::from(i))
    }

    #[test]
    fn version_moves_on_every_change() {
        let mut l = AuthorizedList::new();
        l.push(tag(1)).unwrap();
        l.push(tag(2)).unwrap();
        assert_eq!(l.version(), 2);
        l.remove(&tag(1)).unwrap();
        assert_eq!(l.version(), 3);
        assert_eq!(l.push(tag(2)), Err(ListError::Duplicate));
        assert_eq!(l.remove(&tag(9)), Err(ListError::Missing));
        assert_eq!(l.version(), 3);
    }

    #[test]
    fn digest_binds_version_and_content() {
        let mut a = AuthorizedList::new();
        a.push(tag(1)).unwrap();
        let d1 = a.digest();
        a.push(tag(2)).unwrap();
        a.remove(&tag(2)).unwrap();
        // same entries, later version
        assert_eq!(a.entries(), &[tag(1)]);
        assert_ne!(a.digest(), d1);
    }

    #[test]
    fn empty_digest_is_pinned() {
        assert_eq!(
            hex::encode(AuthorizedList::new().digest()),
            include_str!("../../tests/golden/empty_list_digest.hex").trim()
        );
    }

    #[test]
    fn encoding_round_trip() {
        let mut l = AuthorizedList::new();
        for i in 0..5 {
            l.push(tag(i)).unwrap();
        }
        l.remove(&tag(3)).unwrap();
        let back = AuthorizedList::from_bytes(&l.to_bytes()).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.digest(), l.digest());
    }

    #[test]
    fn merkle_root_odd_counts_differ() {
        let mut seen = std::collections::HashSet::new();
        let mut l = AuthorizedList::new();
        for i in 0..9 {
            l.push(tag(i)).unwrap();
            assert!(seen.insert(merkle_root(l.entries())));
        }
    }
}
