//! Identity tags, authorized lists, and the zero-knowledge machinery that
//! lets a user prove list membership without saying which entry is theirs.

mod crs;
mod escrow;
mod list;
mod proof;
mod tag;

use thiserror::Error;

pub use crs::{crs_gen, Crs, CrsTrapdoor, SUPPORTED_SECURITY_LEVEL};
pub use escrow::{escrow_tag, verify_escrow, EscrowKey, EscrowKeyPair, EscrowProof, TagEscrow};
pub use list::{AuthorizedList, ListError, MAX_LIST_LEN};
pub use proof::{
    prove_claiming_index, prove_membership, simulate_proof, verify_membership, MembershipProof,
    Witness, PROOF_FORMAT,
};
pub use tag::{identity_scalar, make_tag, IdentityTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZkError {
    #[error("malformed CRS encoding")]
    MalformedCrs,
    #[error("unsupported security level {0}")]
    UnsupportedSecurityLevel(u16),
    #[error("witness is not in the authorized list")]
    NotInList,
    #[error("trapdoor does not belong to this CRS")]
    TrapdoorMismatch,
    #[error("list exceeds {MAX_LIST_LEN} entries")]
    ListTooLarge,
    #[error("malformed proof encoding")]
    MalformedProof,
    #[error("malformed escrow encoding")]
    MalformedEscrow,
    #[error("proof rejected")]
    InvalidProof,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{commit, random_scalar, CommitmentKey};
    use curve25519_dalek::scalar::Scalar;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    struct Fixture {
        crs: Crs,
        td: CrsTrapdoor,
        ck: CommitmentKey,
        list: AuthorizedList,
        members: Vec<Scalar>,
    }

    fn fixture(n: usize, rng: &mut ChaCha20Rng) -> Fixture {
        let (crs, td) = crs_gen(128, Some(b"zk-tests")).unwrap();
        let ck = CommitmentKey::derive(b"zk-tests");
        let members: Vec<Scalar> = (0..n).map(|_| random_scalar(rng)).collect();
        let mut list = AuthorizedList::new();
        for m in &members {
            list.push(make_tag(m)).unwrap();
        }
        Fixture {
            crs,
            td,
            ck,
            list,
            members,
        }
    }

    fn witness(identity: Scalar, rng: &mut ChaCha20Rng) -> Witness {
        Witness {
            identity,
            randomness: random_scalar(rng),
        }
    }

    #[test]
    fn honest_proofs_verify_at_every_position() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let f = fixture(7, &mut rng);
        for m in &f.members {
            let w = witness(*m, &mut rng);
            let c = commit(&f.ck, &w.identity, &w.randomness);
            let p = prove_membership(&f.crs, &f.ck, &w, &f.list, b"ctx", &mut rng).unwrap();
            verify_membership(&f.crs, &f.ck, &c, &f.list, b"ctx", &p).unwrap();
            let back = MembershipProof::from_bytes(&p.to_bytes()).unwrap();
            assert_eq!(back, p);
            assert_eq!(p.to_bytes().len(), p.encoded_len());
        }
    }

    #[test]
    fn single_entry_list() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let f = fixture(1, &mut rng);
        let w = witness(f.members[0], &mut rng);
        let c = commit(&f.ck, &w.identity, &w.randomness);
        let p = prove_membership(&f.crs, &f.ck, &w, &f.list, b"", &mut rng).unwrap();
        verify_membership(&f.crs, &f.ck, &c, &f.list, b"", &p).unwrap();
    }

    #[test]
    fn outsider_cannot_prove() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let f = fixture(4, &mut rng);
        let w = witness(random_scalar(&mut rng), &mut rng);
        assert_eq!(
            prove_membership(&f.crs, &f.ck, &w, &f.list, b"", &mut rng).unwrap_err(),
            ZkError::NotInList
        );
        let c = commit(&f.ck, &w.identity, &w.randomness);
        for i in 0..f.list.len() {
            let p = prove_claiming_index(&f.crs, &f.ck, &w, &f.list, i, b"", &mut rng).unwrap();
            assert_eq!(
                verify_membership(&f.crs, &f.ck, &c, &f.list, b"", &p),
                Err(ZkError::InvalidProof)
            );
        }
    }

    #[test]
    fn binds_context_commitment_and_list() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let mut f = fixture(3, &mut rng);
        let w = witness(f.members[1], &mut rng);
        let c = commit(&f.ck, &w.identity, &w.randomness);
        let p = prove_membership(&f.crs, &f.ck, &w, &f.list, b"a", &mut rng).unwrap();
        assert!(verify_membership(&f.crs, &f.ck, &c, &f.list, b"b", &p).is_err());
        let c2 = commit(&f.ck, &w.identity, &(w.randomness + Scalar::ONE));
        assert!(verify_membership(&f.crs, &f.ck, &c2, &f.list, b"a", &p).is_err());
        f.list.push(make_tag(&Scalar::from(5u8))).unwrap();
        assert!(verify_membership(&f.crs, &f.ck, &c, &f.list, b"a", &p).is_err());
    }

    #[test]
    fn any_bit_flip_is_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let f = fixture(2, &mut rng);
        let w = witness(f.members[0], &mut rng);
        let c = commit(&f.ck, &w.identity, &w.randomness);
        let bytes = prove_membership(&f.crs, &f.ck, &w, &f.list, b"", &mut rng)
            .unwrap()
            .to_bytes();
        for i in 0..bytes.len() * 8 {
            let mut b = bytes.clone();
            b[i / 8] ^= 1 << (i % 8);
            if let Ok(p) = MembershipProof::from_bytes(&b) {
                assert!(verify_membership(&f.crs, &f.ck, &c, &f.list, b"", &p).is_err());
            }
        }
    }

    #[test]
    fn simulator_needs_matching_trapdoor() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let f = fixture(5, &mut rng);
        let c = commit(&f.ck, &random_scalar(&mut rng), &random_scalar(&mut rng));
        let p = simulate_proof(&f.crs, &f.ck, &f.td, &c, &f.list, b"x", &mut rng).unwrap();
        verify_membership(&f.crs, &f.ck, &c, &f.list, b"x", &p).unwrap();
        let (_, other_td) = crs_gen(128, Some(b"other")).unwrap();
        assert_eq!(
            simulate_proof(&f.crs, &f.ck, &other_td, &c, &f.list, b"x", &mut rng).unwrap_err(),
            ZkError::TrapdoorMismatch
        );
    }

    #[test]
    fn decode_prefix_reports_consumed_length() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let f = fixture(3, &mut rng);
        let w = witness(f.members[2], &mut rng);
        let mut bytes = prove_membership(&f.crs, &f.ck, &w, &f.list, b"", &mut rng)
            .unwrap()
            .to_bytes();
        let len = bytes.len();
        bytes.extend_from_slice(b"trailer");
        let (_, used) = MembershipProof::decode_prefix(&bytes).unwrap();
        assert_eq!(used, len);
        assert!(MembershipProof::from_bytes(&bytes).is_err());
        assert!(MembershipProof::decode_prefix(&bytes[..len - 1]).is_err());
    }
}
