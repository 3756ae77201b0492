//! Cryptographic building blocks.
//!
//! Everything lives in the Ristretto255 prime-order group: commitments, the
//! chameleon hash, encryption and the sigma protocols in [`crate::zk`] share
//! one scalar type. Signatures are Ed25519 over the same curve.
//!
//! Canonical encodings: group elements are 32-byte compressed Ristretto points,
//! scalars are 32-byte big-endian integers below the group order.

mod chameleon;
mod commitment;
mod encoding;
mod pke;
mod sansig;
mod signature;

pub use chameleon::{
    ch_collide, ch_hash, ch_randomness, ChameleonKeyPair, ChameleonPublicKey, ChameleonRandomness,
};
pub use commitment::{commit, decommit, Commitment, CommitmentKey};
pub use encoding::{
    decode_point, decode_scalar, digest, encode_scalar, hash_to_point, hash_to_scalar,
    random_scalar,
};
pub use pke::{pke_decrypt, pke_encrypt, DecryptionKey, EncKeyPair, EncryptionKey, PKE_OVERHEAD};
pub use sansig::{
    sansig_sanit, sansig_sign, sansig_verify, AdmPolicy, SanSigKeys, SanSigSignature,
};
pub use signature::{verify, SigKeyPair, Signature, VerifyKey};

use thiserror::Error;

/// Failures of the primitive layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("commitment opening does not match")]
    OpeningMismatch,
    #[error("signature rejected")]
    BadSignature,
    #[error("decryption failed")]
    Decrypt,
    #[error("malformed {0} encoding")]
    Malformed(&'static str),
    #[error("admissible block index {index} out of range for {blocks} blocks")]
    InvalidPolicy { index: usize, blocks: usize },
    #[error("block {0} is not sanitizable")]
    FixedBlock(usize),
}
