//! Sanitizable signatures: chameleon-hash-then-sign.
//!
//! Admissible blocks are hashed with the sanitizer's chameleon hash, fixed
//! blocks with SHA-256, and the signer signs the digest vector together with
//! the sanitizer key and the policy. The sanitizer swaps an admissible block
//! by computing a chameleon-hash collision; the signature itself never
//! changes.

use std::collections::BTreeSet;

use rand_core::CryptoRngCore;

use super::chameleon::{
    ch_collide, ch_hash, ch_randomness, ChameleonKeyPair, ChameleonPublicKey, ChameleonRandomness,
};
use super::encoding::digest;
use super::signature::{verify, SigKeyPair, Signature, VerifyKey};
use super::CryptoError;

/// Upper bound on blocks per message; indices are encoded in one byte.
pub const MAX_BLOCKS: usize = 255;

/// Signer and sanitizer key material. In deployment the two halves live with
/// different parties.
#[derive(Clone, Debug)]
pub struct SanSigKeys {
    pub signer: SigKeyPair,
    pub sanitizer: ChameleonKeyPair,
}

impl SanSigKeys {
    pub fn generate<R: CryptoRngCore + ?Sized>(rng: &mut R) -> Self {
        Self {
            signer: SigKeyPair::generate(rng),
            sanitizer: ChameleonKeyPair::generate(rng),
        }
    }
}

/// Which blocks a sanitizer may replace.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AdmPolicy {
    indices: BTreeSet<usize>,
}

impl AdmPolicy {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `ADM(m*, m)`: true iff the two block lists differ only at admissible
    /// positions.
    pub fn admits(&self, sanitized: &[Vec<u8>], original: &[Vec<u8>]) -> bool {
        sanitized.len() == original.len()
            && sanitized
                .iter()
                .zip(original)
                .enumerate()
                .all(|(i, (a, b))| a == b || self.contains(i))
    }

    fn check(&self, blocks: usize) -> Result<(), CryptoError> {
        if blocks > MAX_BLOCKS {
            return Err(CryptoError::InvalidPolicy {
                index: blocks,
                blocks: MAX_BLOCKS,
            });
        }
        match self.indices.iter().find(|&&i| i >= blocks) {
            Some(&index) => Err(CryptoError::InvalidPolicy { index, blocks }),
            None => Ok(()),
        }
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.indices.len());
        out.push(self.indices.len() as u8);
        out.extend(self.indices.iter().map(|&i| i as u8));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SanSigSignature {
    signature: Signature,
    adm: AdmPolicy,
    /// One entry per admissible index, in ascending index order.
    randomness: Vec<ChameleonRandomness>,
}

impl SanSigSignature {
    pub fn adm(&self) -> &AdmPolicy {
        &self.adm
    }

    pub fn encoded_len(&self) -> usize {
        Signature::ENCODED_LEN + 1 + self.adm.len() * (1 + ChameleonRandomness::ENCODED_LEN)
    }

    /// `signature (64) ‖ k (1) ‖ k indices ‖ k × randomness (64)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(self.signature.as_bytes());
        out.extend_from_slice(&self.adm.to_bytes());
        for r in &self.randomness {
            out.extend_from_slice(&r.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let malformed = CryptoError::Malformed("sanitizable signature");
        if bytes.len() < Signature::ENCODED_LEN + 1 {
            return Err(malformed);
        }
        let signature = Signature::from_bytes(&bytes[..64])?;
        let k = bytes[64] as usize;
        let rest = &bytes[65..];
        if rest.len() != k * (1 + ChameleonRandomness::ENCODED_LEN) {
            return Err(malformed);
        }
        let (idx, rand) = rest.split_at(k);
        // strictly ascending keeps the encoding canonical
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(malformed);
        }
        let randomness = rand
            .chunks_exact(ChameleonRandomness::ENCODED_LEN)
            .map(ChameleonRandomness::from_bytes)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            signature,
            adm: AdmPolicy::new(idx.iter().map(|&i| i as usize)),
            randomness,
        })
    }
}

fn block_message(index: usize, block: &[u8]) -> Vec<u8> {
    let mut m = Vec::with_capacity(2 + block.len());
    m.extend_from_slice(&(index as u16).to_be_bytes());
    m.extend_from_slice(block);
    m
}

fn fixed_digest(index: usize, block: &[u8]) -> [u8; 32] {
    digest(
        "mvno-aka/sansig/fixed-block",
        &[&(index as u16).to_be_bytes(), block],
    )
}

fn signed_message(pk_san: &ChameleonPublicKey, adm: &AdmPolicy, digests: &[[u8; 32]]) -> Vec<u8> {
    let mut m = Vec::with_capacity(64 + 32 * digests.len());
    m.extend_from_slice(b"mvno-aka/sansig/v1");
    m.extend_from_slice(pk_san.as_bytes());
    m.extend_from_slice(&adm.to_bytes());
    m.extend_from_slice(&(digests.len() as u16).to_be_bytes());
    for d in digests {
        m.extend_from_slice(d);
    }
    m
}

fn digests(
    blocks: &[Vec<u8>],
    pk_san: &ChameleonPublicKey,
    adm: &AdmPolicy,
    randomness: &[ChameleonRandomness],
) -> Result<Vec<[u8; 32]>, CryptoError> {
    let mut rand = randomness.iter();
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if adm.contains(i) {
                let r = rand.next().ok_or(CryptoError::BadSignature)?;
                ch_hash(pk_san, &block_message(i, b), r)
            } else {
                Ok(fixed_digest(i, b))
            }
        })
        .collect()
}

pub fn sansig_sign<R: CryptoRngCore + ?Sized>(
    blocks: &[Vec<u8>],
    signer: &SigKeyPair,
    pk_san: &ChameleonPublicKey,
    adm: &AdmPolicy,
    rng: &mut R,
) -> Result<SanSigSignature, CryptoError> {
    adm.check(blocks.len())?;
    let randomness: Vec<_> = adm.indices().map(|_| ch_randomness(rng)).collect();
    let d = digests(blocks, pk_san, adm, &randomness)?;
    Ok(SanSigSignature {
        signature: signer.sign(&signed_message(pk_san, adm, &d)),
        adm: adm.clone(),
        randomness,
    })
}

pub fn sansig_verify(
    blocks: &[Vec<u8>],
    sig: &SanSigSignature,
    pk_sig: &VerifyKey,
    pk_san: &ChameleonPublicKey,
) -> Result<(), CryptoError> {
    sig.adm
        .check(blocks.len())
        .map_err(|_| CryptoError::BadSignature)?;
    if sig.randomness.len() != sig.adm.len() {
        return Err(CryptoError::BadSignature);
    }
    let d = digests(blocks, pk_san, &sig.adm, &sig.randomness)?;
    verify(
        pk_sig,
        &signed_message(pk_san, &sig.adm, &d),
        &sig.signature,
    )
}

/// Applies `modifications` (block index, replacement) and returns the
/// sanitized message with its signature. Only admissible blocks may change;
/// the input signature must verify under the sanitizer's own key.
pub fn sansig_sanit<R: CryptoRngCore + ?Sized>(
    blocks: &[Vec<u8>],
    modifications: &[(usize, Vec<u8>)],
    sig: &SanSigSignature,
    pk_sig: &VerifyKey,
    sanitizer: &ChameleonKeyPair,
    rng: &mut R,
) -> Result<(Vec<Vec<u8>>, SanSigSignature), CryptoError> {
    if let Some((i, _)) = modifications.iter().find(|(i, _)| !sig.adm.contains(*i)) {
        return Err(CryptoError::FixedBlock(*i));
    }
    sansig_verify(blocks, sig, pk_sig, sanitizer.public())?;

    let mut out_blocks = blocks.to_vec();
    let mut out_sig = sig.clone();
    for (index, replacement) in modifications {
        let slot = sig
            .adm
            .indices()
            .position(|i| i == *index)
            .expect("checked above");
        let h = ch_hash(
            sanitizer.public(),
            &block_message(*index, &out_blocks[*index]),
            &out_sig.randomness[slot],
        )?;
        out_sig.randomness[slot] =
            ch_collide(sanitizer, &h, &block_message(*index, replacement), rng)?;
        out_blocks[*index] = replacement.clone();
    }
    Ok((out_blocks, out_sig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn four_blocks() -> Vec<Vec<u8>> {
        vec![
            b"loc".to_vec(),
            b"exp".to_vec(),
            b"id|t0".to_vec(),
            b"tail".to_vec(),
        ]
    }

    #[test]
    fn sign_verify_and_tamper() {
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let keys = SanSigKeys::generate(&mut rng);
        let adm = AdmPolicy::new([2]);
        let blocks = four_blocks();
        let sig = sansig_sign(
            &blocks,
            &keys.signer,
            keys.sanitizer.public(),
            &adm,
            &mut rng,
        )
        .unwrap();
        let pk = keys.signer.verify_key();
        assert!(sansig_verify(&blocks, &sig, &pk, keys.sanitizer.public()).is_ok());

        // every single-block edit without sanitizing must fail, admissible or not
        for i in 0..blocks.len() {
            let mut edited = blocks.clone();
            edited[i].push(b'!');
            assert!(
                sansig_verify(&edited, &sig, &pk, keys.sanitizer.public()).is_err(),
                "block {i}"
            );
        }

        let other = ChameleonKeyPair::generate(&mut rng);
        assert!(sansig_verify(&blocks, &sig, &pk, other.public()).is_err());
    }

    #[test]
    fn sanitize_admissible_block() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let keys = SanSigKeys::generate(&mut rng);
        let adm = AdmPolicy::new([2]);
        let blocks = four_blocks();
        let pk = keys.signer.verify_key();
        let sig = sansig_sign(
            &blocks,
            &keys.signer,
            keys.sanitizer.public(),
            &adm,
            &mut rng,
        )
        .unwrap();

        let (b1, s1) = sansig_sanit(
            &blocks,
            &[(2, b"id|t1".to_vec())],
            &sig,
            &pk,
            &keys.sanitizer,
            &mut rng,
        )
        .unwrap();
        let (b2, s2) = sansig_sanit(
            &blocks,
            &[(2, b"id|t2".to_vec())],
            &sig,
            &pk,
            &keys.sanitizer,
            &mut rng,
        )
        .unwrap();
        assert!(sansig_verify(&b1, &s1, &pk, keys.sanitizer.public()).is_ok());
        assert!(sansig_verify(&b2, &s2, &pk, keys.sanitizer.public()).is_ok());
        assert_ne!(s1.to_bytes(), s2.to_bytes());
        assert!(adm.admits(&b1, &blocks));
        assert_eq!(b1[..2], blocks[..2]);

        // chained sanitization keeps working
        let (b3, s3) = sansig_sanit(
            &b1,
            &[(2, b"id|t3".to_vec())],
            &s1,
            &pk,
            &keys.sanitizer,
            &mut rng,
        )
        .unwrap();
        assert!(sansig_verify(&b3, &s3, &pk, keys.sanitizer.public()).is_ok());

        // fixed block edit after sanitization still fails
        let mut bad = b3.clone();
        bad[0] = b"elsewhere".to_vec();
        assert!(sansig_verify(&bad, &s3, &pk, keys.sanitizer.public()).is_err());
    }

    #[test]
    fn sanitizing_fixed_block_is_an_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let keys = SanSigKeys::generate(&mut rng);
        let adm = AdmPolicy::new([2]);
        let blocks = four_blocks();
        let sig = sansig_sign(
            &blocks,
            &keys.signer,
            keys.sanitizer.public(),
            &adm,
            &mut rng,
        )
        .unwrap();
        let err = sansig_sanit(
            &blocks,
            &[(0, b"x".to_vec())],
            &sig,
            &keys.signer.verify_key(),
            &keys.sanitizer,
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, CryptoError::FixedBlock(0));
    }

    #[test]
    fn foreign_sanitizer_cannot_sanitize() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let keys = SanSigKeys::generate(&mut rng);
        let intruder = ChameleonKeyPair::generate(&mut rng);
        let adm = AdmPolicy::new([2]);
        let blocks = four_blocks();
        let sig = sansig_sign(
            &blocks,
            &keys.signer,
            keys.sanitizer.public(),
            &adm,
            &mut rng,
        )
        .unwrap();
        let pk = keys.signer.verify_key();
        assert!(sansig_sanit(
            &blocks,
            &[(2, b"x".to_vec())],
            &sig,
            &pk,
            &intruder,
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn invalid_policy_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        let keys = SanSigKeys::generate(&mut rng);
        let err = sansig_sign(
            &four_blocks(),
            &keys.signer,
            keys.sanitizer.public(),
            &AdmPolicy::new([4]),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(
            err,
            CryptoError::InvalidPolicy {
                index: 4,
                blocks: 4
            }
        );
    }

    #[test]
    fn signature_encoding_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(25);
        let keys = SanSigKeys::generate(&mut rng);
        let sig = sansig_sign(
            &four_blocks(),
            &keys.signer,
            keys.sanitizer.public(),
            &AdmPolicy::new([1, 2]),
            &mut rng,
        )
        .unwrap();
        let bytes = sig.to_bytes();
        assert_eq!(bytes.len(), sig.encoded_len());
        assert_eq!(SanSigSignature::from_bytes(&bytes).unwrap(), sig);
        assert!(SanSigSignature::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
