//! One-out-of-many membership proof.
//!
//! Statement: commitment `c` under `(G, H)`, list `T_0..T_{n-1}`, CRS `(B, Y)`.
//! Branch `i < n` claims knowledge of `r` with `c + O − T_i = r·H`, which holds
//! exactly when `c` commits to the scalar behind `T_i`. Branch `n` claims
//! knowledge of the CRS trapdoor, `Y = td·B`. The proof is an OR-composition
//! of the `n + 1` Schnorr proofs: the prover answers its own branch and
//! simulates the rest, and challenges must sum to the Fiat-Shamir hash.
//! Honest users hold a list witness; the simulator holds `td`. Both produce
//! identically distributed proofs.
//!
//! Verification checks all `n + 1` Schnorr equations at once as a single
//! random linear combination, with weights derived from the proof itself.

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::{IsIdentity, VartimeMultiscalarMul};
use rand_chacha::ChaCha20Rng;
use rand_core::{CryptoRngCore, SeedableRng};
use zeroize::{Zeroize, ZeroizeOnDrop};

use super::crs::{Crs, CrsTrapdoor};
use super::list::{AuthorizedList, MAX_LIST_LEN};
use super::tag::{make_tag, tag_offset};
use super::ZkError;
use crate::primitives::{
    decode_point, decode_scalar, digest, encode_scalar, hash_to_scalar, random_scalar, Commitment,
    CommitmentKey,
};

pub const PROOF_FORMAT: u8 = 1;

/// Opening of the prover's commitment: `c = identity·G + randomness·H`.
#[derive(Clone, Zeroize, ZeroizeOnDrop)]
pub struct Witness {
    pub identity: Scalar,
    pub randomness: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipProof {
    list_version: u32,
    commitments: Vec<CompressedRistretto>,
    challenges: Vec<Scalar>,
    responses: Vec<Scalar>,
}

struct Statement<'a> {
    crs: &'a Crs,
    ck: &'a CommitmentKey,
    commitment: &'a Commitment,
    list: &'a AuthorizedList,
    context: &'a [u8],
}

impl Statement<'_> {
    fn branches(&self) -> usize {
        self.list.len() + 1
    }

    /// `(base, target)` of branch `i`.
    fn branch(&self, shifted: &RistrettoPoint, i: usize) -> (RistrettoPoint, RistrettoPoint) {
        match self.list.entries().get(i) {
            Some(tag) => (*self.ck.h(), shifted - tag.point()),
            None => (*self.crs.base(), *self.crs.trapdoor_key()),
        }
    }

    fn challenge(&self, commitments: &[CompressedRistretto]) -> Scalar {
        let mut firsts = Vec::with_capacity(32 * commitments.len());
        for a in commitments {
            firsts.extend_from_slice(a.as_bytes());
        }
        hash_to_scalar(
            "mvno-aka/zk-membership/v1",
            &[
                &self.crs.digest(),
                &self.ck.digest(),
                self.commitment.as_bytes(),
                &self.list.digest(),
                self.context,
                &firsts,
            ],
        )
    }

    fn prove<R: CryptoRngCore + ?Sized>(
        &self,
        real: usize,
        secret: &Scalar,
        rng: &mut R,
    ) -> MembershipProof {
        let n1 = self.branches();
        let shifted = self.commitment.point() + tag_offset();
        let mut challenges = vec![Scalar::ZERO; n1];
        let mut responses = vec![Scalar::ZERO; n1];
        let mut commitments = Vec::with_capacity(n1);
        let nonce = random_scalar(rng);
        for i in 0..n1 {
            let (base, target) = self.branch(&shifted, i);
            let a = if i == real {
                nonce * base
            } else {
                challenges[i] = random_scalar(rng);
                responses[i] = random_scalar(rng);
                RistrettoPoint::vartime_multiscalar_mul(
                    [responses[i], -challenges[i]],
                    [base, target],
                )
            };
            commitments.push(a.compress());
        }
        let total = self.challenge(&commitments);
        let others: Scalar = challenges.iter().sum();
        challenges[real] = total - others;
        responses[real] = nonce + challenges[real] * secret;
        MembershipProof {
            list_version: self.list.version(),
            commitments,
            challenges,
            responses,
        }
    }

    fn verify(&self, proof: &MembershipProof) -> bool {
        let n1 = self.branches();
        let n = n1 - 1;
        if proof.list_version != self.list.version()
            || proof.commitments.len() != n1
            || proof.challenges.len() != n1
            || proof.responses.len() != n1
        {
            return false;
        }
        let Some(firsts) = proof
            .commitments
            .iter()
            .map(|a| a.decompress())
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let total = self.challenge(&proof.commitments);
        if proof.challenges.iter().sum::<Scalar>() != total {
            return false;
        }

        let weights = batch_weights(&total, proof);
        let shifted = self.commitment.point() + tag_offset();
        let mut h_coeff = Scalar::ZERO;
        let mut shifted_coeff = Scalar::ZERO;
        let mut scalars = Vec::with_capacity(2 * n1 + 3);
        let mut points = Vec::with_capacity(2 * n1 + 3);
        for (i, tag) in self.list.entries().iter().enumerate() {
            let we = weights[i] * proof.challenges[i];
            h_coeff += weights[i] * proof.responses[i];
            shifted_coeff -= we;
            scalars.push(we);
            points.push(*tag.point());
        }
        for (w, a) in weights.iter().zip(&firsts) {
            scalars.push(-w);
            points.push(*a);
        }
        scalars.extend([
            h_coeff,
            shifted_coeff,
            weights[n] * proof.responses[n],
            -(weights[n] * proof.challenges[n]),
        ]);
        points.extend([
            *self.ck.h(),
            shifted,
            *self.crs.base(),
            *self.crs.trapdoor_key(),
        ]);
        RistrettoPoint::vartime_multiscalar_mul(scalars, points).is_identity()
    }
}

fn batch_weights(total: &Scalar, proof: &MembershipProof) -> Vec<Scalar> {
    let mut transcript = Vec::with_capacity(32 + 64 * proof.challenges.len());
    transcript.extend_from_slice(&total.to_bytes());
    for (e, s) in proof.challenges.iter().zip(&proof.responses) {
        transcript.extend_from_slice(&e.to_bytes());
        transcript.extend_from_slice(&s.to_bytes());
    }
    let seed = digest("mvno-aka/zk-membership/batch", &[&transcript]);
    let mut rng = ChaCha20Rng::from_seed(seed);
    (0..proof.challenges.len())
        .map(|_| random_scalar(&mut rng))
        .collect()
}

/// Proves that `commit(ck, witness.identity, witness.randomness)` opens to an
/// identity whose tag is in `list`. `context` is bound into the Fiat-Shamir
/// hash; the verifier must pass the same bytes.
pub fn prove_membership<R: CryptoRngCore + ?Sized>(
    crs: &Crs,
    ck: &CommitmentKey,
    witness: &Witness,
    list: &AuthorizedList,
    context: &[u8],
    rng: &mut R,
) -> Result<MembershipProof, ZkError> {
    let index = list
        .position(&make_tag(&witness.identity))
        .ok_or(ZkError::NotInList)?;
    prove_claiming_index(crs, ck, witness, list, index, context, rng)
}

/// Runs the prover with `witness` placed at list position `index` whether or
/// not the tag there matches. Exposed so the verifier's soundness can be
/// exercised with mismatched witnesses; an honest caller wants
/// [`prove_membership`].
pub fn prove_claiming_index<R: CryptoRngCore + ?Sized>(
    crs: &Crs,
    ck: &CommitmentKey,
    witness: &Witness,
    list: &AuthorizedList,
    index: usize,
    context: &[u8],
    rng: &mut R,
) -> Result<MembershipProof, ZkError> {
    if list.len() > MAX_LIST_LEN {
        return Err(ZkError::ListTooLarge);
    }
    if index >= list.len() {
        return Err(ZkError::NotInList);
    }
    let commitment = crate::primitives::commit(ck, &witness.identity, &witness.randomness);
    let statement = Statement {
        crs,
        ck,
        commitment: &commitment,
        list,
        context,
    };
    Ok(statement.prove(index, &witness.randomness, rng))
}

pub fn verify_membership(
    crs: &Crs,
    ck: &CommitmentKey,
    commitment: &Commitment,
    list: &AuthorizedList,
    context: &[u8],
    proof: &MembershipProof,
) -> Result<(), ZkError> {
    let statement = Statement {
        crs,
        ck,
        commitment,
        list,
        context,
    };
    if statement.verify(proof) {
        Ok(())
    } else {
        Err(ZkError::InvalidProof)
    }
}

/// Produces an accepting proof for any commitment, member or not, using the
/// CRS trapdoor.
pub fn simulate_proof<R: CryptoRngCore + ?Sized>(
    crs: &Crs,
    ck: &CommitmentKey,
    td: &CrsTrapdoor,
    commitment: &Commitment,
    list: &AuthorizedList,
    context: &[u8],
    rng: &mut R,
) -> Result<MembershipProof, ZkError> {
    if !td.matches(crs) {
        return Err(ZkError::TrapdoorMismatch);
    }
    if list.len() > MAX_LIST_LEN {
        return Err(ZkError::ListTooLarge);
    }
    let statement = Statement {
        crs,
        ck,
        commitment,
        list,
        context,
    };
    Ok(statement.prove(list.len(), &td.0, rng))
}

impl MembershipProof {
    pub fn list_version(&self) -> u32 {
        self.list_version
    }

    pub fn branches(&self) -> usize {
        self.commitments.len()
    }

    pub fn encoded_len(&self) -> usize {
        1 + 4 + 3 * (2 + 32 * self.commitments.len())
    }

    /// `format (1) ‖ list version (4, BE) ‖ [len (2, BE) ‖ first moves]
    /// ‖ [len ‖ challenges] ‖ [len ‖ responses]`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.encode_into(&mut out);
        out
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) {
        let len = (32 * self.commitments.len()) as u16;
        out.push(PROOF_FORMAT);
        out.extend_from_slice(&self.list_version.to_be_bytes());
        out.extend_from_slice(&len.to_be_bytes());
        for a in &self.commitments {
            out.extend_from_slice(a.as_bytes());
        }
        for component in [&self.challenges, &self.responses] {
            out.extend_from_slice(&len.to_be_bytes());
            for s in component {
                out.extend_from_slice(&encode_scalar(s));
            }
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let (proof, used) = Self::decode_prefix(bytes)?;
        if used != bytes.len() {
            return Err(ZkError::MalformedProof);
        }
        Ok(proof)
    }

    /// Decodes a proof from the front of `bytes`, returning it with the
    /// number of bytes consumed.
    pub fn decode_prefix(bytes: &[u8]) -> Result<(Self, usize), ZkError> {
        let bad = ZkError::MalformedProof;
        if bytes.len() < 5 || bytes[0] != PROOF_FORMAT {
            return Err(bad);
        }
        let list_version = u32::from_be_bytes(bytes[1..5].try_into().unwrap());
        let mut pos = 5;
        let component = |pos: &mut usize| -> Result<&[u8], ZkError> {
            let header = bytes.get(*pos..*pos + 2).ok_or(ZkError::MalformedProof)?;
            let len = u16::from_be_bytes([header[0], header[1]]) as usize;
            let body = bytes
                .get(*pos + 2..*pos + 2 + len)
                .ok_or(ZkError::MalformedProof)?;
            *pos += 2 + len;
            if len == 0 || !len.is_multiple_of(32) {
                return Err(ZkError::MalformedProof);
            }
            Ok(body)
        };
        let firsts = component(&mut pos)?;
        let chal = component(&mut pos)?;
        let resp = component(&mut pos)?;
        if firsts.len() != chal.len() || chal.len() != resp.len() {
            return Err(bad);
        }
        let commitments = firsts
            .chunks_exact(32)
            .map(|c| decode_point(c).map(|p| p.compress()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ZkError::MalformedProof)?;
        let scalars = |b: &[u8]| {
            b.chunks_exact(32)
                .map(decode_scalar)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ZkError::MalformedProof)
        };
        Ok((
            Self {
                list_version,
                commitments,
                challenges: scalars(chal)?,
                responses: scalars(resp)?,
            },
            pos,
        ))
    }
}
