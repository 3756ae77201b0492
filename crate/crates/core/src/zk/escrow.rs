//! Verifiable escrow of an identity tag to the MVNO.
//!
//! The prover ElGamal-encrypts the tag of the identity committed in `c`
//! under the MVNO escrow key `P = s·G`: `(u, v) = (k·G, tag + k·P)`, and
//! proves in zero knowledge that the plaintext is the tag of the committed
//! identity. Only the MVNO can open it, which lets it link a pseudonym to
//! the credentials later issued against it.

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::VartimeMultiscalarMul;
use rand_core::CryptoRngCore;
use zeroize::{Zeroize, ZeroizeOnDrop};

use super::tag::{make_tag, tag_offset, IdentityTag};
use super::{Witness, ZkError};
use crate::primitives::{
    commit, decode_point, decode_scalar, encode_scalar, hash_to_scalar, random_scalar, Commitment,
    CommitmentKey,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EscrowKey {
    point: RistrettoPoint,
    compressed: CompressedRistretto,
}

impl EscrowKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        self.compressed.as_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let point = decode_point(bytes).map_err(|_| ZkError::MalformedEscrow)?;
        Ok(Self {
            point,
            compressed: point.compress(),
        })
    }
}

#[derive(Clone, Zeroize, ZeroizeOnDrop)]
pub struct EscrowKeyPair {
    secret: Scalar,
    #[zeroize(skip)]
    public: EscrowKey,
}

impl EscrowKeyPair {
    pub fn generate<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        let secret = random_scalar(rng);
        let point = &secret * RISTRETTO_BASEPOINT_TABLE;
        Self {
            secret,
            public: EscrowKey {
                point,
                compressed: point.compress(),
            },
        }
    }

    pub fn public(&self) -> &EscrowKey {
        &self.public
    }

    pub fn open(&self, escrow: &TagEscrow) -> IdentityTag {
        IdentityTag::from_point(escrow.v - self.secret * escrow.u)
    }
}

impl std::fmt::Debug for EscrowKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EscrowKeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

/// ElGamal ciphertext of an identity tag. 64 bytes on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TagEscrow {
    u: RistrettoPoint,
    v: RistrettoPoint,
}

impl TagEscrow {
    pub const ENCODED_LEN: usize = 64;

    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(self.u.compress().as_bytes());
        out[32..].copy_from_slice(self.v.compress().as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        if bytes.len() != 64 {
            return Err(ZkError::MalformedEscrow);
        }
        let u = decode_point(&bytes[..32]).map_err(|_| ZkError::MalformedEscrow)?;
        let v = decode_point(&bytes[32..]).map_err(|_| ZkError::MalformedEscrow)?;
        Ok(Self { u, v })
    }
}

/// `e ‖ z_x ‖ z_r ‖ z_k`, 128 bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EscrowProof {
    challenge: Scalar,
    z_identity: Scalar,
    z_randomness: Scalar,
    z_key: Scalar,
}

impl EscrowProof {
    pub const ENCODED_LEN: usize = 128;

    pub fn to_bytes(&self) -> [u8; 128] {
        let mut out = [0u8; 128];
        for (chunk, s) in out.chunks_exact_mut(32).zip([
            &self.challenge,
            &self.z_identity,
            &self.z_randomness,
            &self.z_key,
        ]) {
            chunk.copy_from_slice(&encode_scalar(s));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        if bytes.len() != 128 {
            return Err(ZkError::MalformedEscrow);
        }
        let s = |i: usize| {
            decode_scalar(&bytes[32 * i..32 * (i + 1)]).map_err(|_| ZkError::MalformedEscrow)
        };
        Ok(Self {
            challenge: s(0)?,
            z_identity: s(1)?,
            z_randomness: s(2)?,
            z_key: s(3)?,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn challenge(
    ck: &CommitmentKey,
    key: &EscrowKey,
    commitment: &Commitment,
    escrow: &TagEscrow,
    firsts: [RistrettoPoint; 3],
    context: &[u8],
) -> Scalar {
    let [r1, r2, r3] = firsts.map(|p| p.compress().to_bytes());
    hash_to_scalar(
        "mvno-aka/tag-escrow/v1",
        &[
            &ck.digest(),
            key.as_bytes(),
            commitment.as_bytes(),
            &escrow.to_bytes(),
            &r1,
            &r2,
            &r3,
            context,
        ],
    )
}

/// Encrypts the tag of `witness.identity` to `key` and proves it matches the
/// commitment `commit(ck, identity, randomness)`.
pub fn escrow_tag<R: CryptoRngCore + ?Sized>(
    ck: &CommitmentKey,
    key: &EscrowKey,
    witness: &Witness,
    context: &[u8],
    rng: &mut R,
) -> (TagEscrow, EscrowProof) {
    let g = ck.g();
    let k = random_scalar(rng);
    let escrow = TagEscrow {
        u: &k * RISTRETTO_BASEPOINT_TABLE,
        v: make_tag(&witness.identity).point() + k * key.point,
    };
    let commitment = commit(ck, &witness.identity, &witness.randomness);
    let (a_x, a_r, a_k) = (random_scalar(rng), random_scalar(rng), random_scalar(rng));
    let firsts = [a_x * g + a_r * ck.h(), a_k * g, a_x * g + a_k * key.point];
    let e = challenge(ck, key, &commitment, &escrow, firsts, context);
    let proof = EscrowProof {
        challenge: e,
        z_identity: a_x + e * witness.identity,
        z_randomness: a_r + e * witness.randomness,
        z_key: a_k + e * k,
    };
    (escrow, proof)
}

pub fn verify_escrow(
    ck: &CommitmentKey,
    key: &EscrowKey,
    commitment: &Commitment,
    escrow: &TagEscrow,
    proof: &EscrowProof,
    context: &[u8],
) -> Result<(), ZkError> {
    let g = *ck.g();
    let e = proof.challenge;
    let firsts = [
        RistrettoPoint::vartime_multiscalar_mul(
            [proof.z_identity, proof.z_randomness, -e],
            [g, *ck.h(), *commitment.point()],
        ),
        RistrettoPoint::vartime_multiscalar_mul([proof.z_key, -e], [g, escrow.u]),
        RistrettoPoint::vartime_multiscalar_mul(
            [proof.z_identity, proof.z_key, -e],
            [g, key.point, escrow.v - tag_offset()],
        ),
    ];
    if challenge(ck, key, commitment, escrow, firsts, context) == e {
        Ok(())
    } else {
        Err(ZkError::InvalidProof)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn setup(rng: &mut ChaCha20Rng) -> (CommitmentKey, EscrowKeyPair, Witness) {
        let ck = CommitmentKey::derive(b"escrow-test");
        let kp = EscrowKeyPair::generate(rng);
        let w = Witness {
            identity: random_scalar(rng),
            randomness: random_scalar(rng),
        };
        (ck, kp, w)
    }

    #[test]
    fn opens_to_committed_tag() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (ck, kp, w) = setup(&mut rng);
        let c = commit(&ck, &w.identity, &w.randomness);
        let (esc, proof) = escrow_tag(&ck, kp.public(), &w, b"ctx", &mut rng);
        verify_escrow(&ck, kp.public(), &c, &esc, &proof, b"ctx").unwrap();
        assert_eq!(kp.open(&esc), make_tag(&w.identity));
        let esc2 = TagEscrow::from_bytes(&esc.to_bytes()).unwrap();
        let proof2 = EscrowProof::from_bytes(&proof.to_bytes()).unwrap();
        verify_escrow(&ck, kp.public(), &c, &esc2, &proof2, b"ctx").unwrap();
    }

    #[test]
    fn rejects_wrong_context_commitment_or_plaintext() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (ck, kp, w) = setup(&mut rng);
        let c = commit(&ck, &w.identity, &w.randomness);
        let (esc, proof) = escrow_tag(&ck, kp.public(), &w, b"ctx", &mut rng);
        assert!(verify_escrow(&ck, kp.public(), &c, &esc, &proof, b"other").is_err());
        let c_other = commit(&ck, &(w.identity + Scalar::ONE), &w.randomness);
        assert!(verify_escrow(&ck, kp.public(), &c_other, &esc, &proof, b"ctx").is_err());
        let shifted = TagEscrow {
            u: esc.u,
            v: esc.v + ck.g(),
        };
        assert!(verify_escrow(&ck, kp.public(), &c, &shifted, &proof, b"ctx").is_err());
    }

    #[test]
    fn fresh_escrows_differ() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (ck, kp, w) = setup(&mut rng);
        let (a, _) = escrow_tag(&ck, kp.public(), &w, b"", &mut rng);
        let (b, _) = escrow_tag(&ck, kp.public(), &w, b"", &mut rng);
        assert_ne!(a.to_bytes(), b.to_bytes());
        assert_eq!(kp.open(&a), kp.open(&b));
    }
}
