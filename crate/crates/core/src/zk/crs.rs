use curve25519_dalek::ristretto::RistrettoPoint;
use curve25519_dalek::scalar::Scalar;
use rand_core::{CryptoRngCore, OsRng};
use zeroize::{Zeroize, ZeroizeOnDrop};

use super::ZkError;
use crate::primitives::{decode_point, digest, hash_to_point, hash_to_scalar, random_scalar};

pub const SUPPORTED_SECURITY_LEVEL: u16 = 128;
const CRS_FORMAT: u8 = 1;

/// Common reference string for membership proofs.
///
/// Byte format (99 bytes):
///
/// ```text
/// format (1) = 0x01 ‖ security level (2, BE) ‖ base B (32) ‖ trapdoor key Y = td·B (32)
///   ‖ list binding (32) = SHA-256 label of the authorized-list encoding
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crs {
    security_level: u16,
    base: RistrettoPoint,
    trapdoor_key: RistrettoPoint,
    list_binding: [u8; 32],
}

/// The simulation trapdoor `td` with `Y = td·B`. Never leaves the MVNO.
#[derive(Clone, Zeroize, ZeroizeOnDrop)]
pub struct CrsTrapdoor(pub(crate) Scalar);

impl std::fmt::Debug for CrsTrapdoor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CrsTrapdoor(..)")
    }
}

fn list_binding() -> [u8; 32] {
    digest("mvno-aka/crs/list-binding", &[b"authorized-list/v1"])
}

impl Crs {
    pub const ENCODED_LEN: usize = 99;

    fn from_parts(security_level: u16, base: RistrettoPoint, td: Scalar) -> (Crs, CrsTrapdoor) {
        let crs = Crs {
            security_level,
            base,
            trapdoor_key: td * base,
            list_binding: list_binding(),
        };
        (crs, CrsTrapdoor(td))
    }

    pub fn generate<R: CryptoRngCore + ?Sized>(
        security_level: u16,
        rng: &mut R,
    ) -> Result<(Crs, CrsTrapdoor), ZkError> {
        check_level(security_level)?;
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let base = hash_to_point("mvno-aka/crs/base", &[&seed]);
        Ok(Self::from_parts(security_level, base, random_scalar(rng)))
    }

    pub fn derive(security_level: u16, seed: &[u8]) -> Result<(Crs, CrsTrapdoor), ZkError> {
        check_level(security_level)?;
        let base = hash_to_point("mvno-aka/crs/base", &[seed]);
        let td = hash_to_scalar("mvno-aka/crs/trapdoor", &[seed]);
        Ok(Self::from_parts(security_level, base, td))
    }

    pub fn security_level(&self) -> u16 {
        self.security_level
    }

    pub(crate) fn base(&self) -> &RistrettoPoint {
        &self.base
    }

    pub(crate) fn trapdoor_key(&self) -> &RistrettoPoint {
        &self.trapdoor_key
    }

    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0] = CRS_FORMAT;
        out[1..3].copy_from_slice(&self.security_level.to_be_bytes());
        out[3..35].copy_from_slice(self.base.compress().as_bytes());
        out[35..67].copy_from_slice(self.trapdoor_key.compress().as_bytes());
        out[67..].copy_from_slice(&self.list_binding);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        if bytes.len() != Self::ENCODED_LEN || bytes[0] != CRS_FORMAT {
            return Err(ZkError::MalformedCrs);
        }
        let security_level = u16::from_be_bytes([bytes[1], bytes[2]]);
        check_level(security_level)?;
        let base = decode_point(&bytes[3..35]).map_err(|_| ZkError::MalformedCrs)?;
        let trapdoor_key = decode_point(&bytes[35..67]).map_err(|_| ZkError::MalformedCrs)?;
        if bytes[67..] != list_binding() {
            return Err(ZkError::MalformedCrs);
        }
        Ok(Self {
            security_level,
            base,
            trapdoor_key,
            list_binding: list_binding(),
        })
    }

    pub fn digest(&self) -> [u8; 32] {
        digest("mvno-aka/crs", &[&self.to_bytes()])
    }
}

impl CrsTrapdoor {
    pub fn matches(&self, crs: &Crs) -> bool {
        self.0 * crs.base == crs.trapdoor_key
    }
}

fn check_level(level: u16) -> Result<(), ZkError> {
    if level == SUPPORTED_SECURITY_LEVEL {
        Ok(())
    } else {
        Err(ZkError::UnsupportedSecurityLevel(level))
    }
}

/// `seed = None` draws from the OS; `Some` gives a reproducible CRS.
pub fn crs_gen(security_level: u16, seed: Option<&[u8]>) -> Result<(Crs, CrsTrapdoor), ZkError> {
    match seed {
        Some(s) => Crs::derive(security_level, s),
        None => Crs::generate(security_level, &mut OsRng),
    }
}
