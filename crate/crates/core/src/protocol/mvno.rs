use std::collections::{BTreeMap, BTreeSet};

use curve25519_dalek::scalar::Scalar;
use rand_chacha::ChaCha20Rng;
use rand_core::{CryptoRngCore, SeedableRng};
use zeroize::Zeroize;

use super::{Cn, Mno, NetworkDirectory, ProtocolError};
use crate::primitives::{digest, random_scalar, CommitmentKey};
use crate::zk::{
    make_tag, AuthorizedList, Crs, CrsTrapdoor, EscrowKey, EscrowKeyPair, IdentityTag, TagEscrow,
    SUPPORTED_SECURITY_LEVEL,
};

/// Public parameters the MVNO shares with the operator's core network.
#[derive(Clone, Debug)]
pub struct SystemParams {
    pub crs: Crs,
    pub ck: CommitmentKey,
    pub escrow_key: EscrowKey,
    pub aka_list: AuthorizedList,
}

/// What a subscriber receives at registration, over a channel assumed secure.
#[derive(Clone)]
pub struct UserCredential {
    pub pid: Scalar,
    pub crs: Crs,
    pub ck: CommitmentKey,
    pub escrow_key: EscrowKey,
    pub aka_list: AuthorizedList,
    pub directory: NetworkDirectory,
}

impl Drop for UserCredential {
    fn drop(&mut self) {
        self.pid.zeroize();
    }
}

impl std::fmt::Debug for UserCredential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UserCredential")
            .field("aka_list_version", &self.aka_list.version())
            .finish_non_exhaustive()
    }
}

/// Sent by the CN to the MVNO whenever it issues a UID: the escrowed pseudonym
/// tag from the request and the tag of the new UID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscrowReport {
    pub escrow: TagEscrow,
    pub uid_tag: IdentityTag,
}

/// Tells the CN which tags to strike from its AKA and handover lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevocationNotice {
    pub pid_tag: IdentityTag,
    pub uid_tags: Vec<IdentityTag>,
}

pub struct Mvno {
    crs: Crs,
    td: CrsTrapdoor,
    ck: CommitmentKey,
    escrow: EscrowKeyPair,
    users: BTreeMap<Vec<u8>, Scalar>,
    aka_list: AuthorizedList,
    links: BTreeMap<IdentityTag, BTreeSet<IdentityTag>>,
    directory: NetworkDirectory,
}

impl std::fmt::Debug for Mvno {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mvno")
            .field("users", &self.users.len())
            .field("aka_list_version", &self.aka_list.version())
            .finish_non_exhaustive()
    }
}

impl Mvno {
    /// Derives the CRS, commitment key and escrow key from `seed`.
    pub fn setup(seed: &[u8]) -> Self {
        let (crs, td) =
            Crs::derive(SUPPORTED_SECURITY_LEVEL, seed).expect("supported level never fails");
        let mut escrow_rng = ChaCha20Rng::from_seed(digest("mvno-aka/mvno/escrow-key", &[seed]));
        Self {
            crs,
            td,
            ck: CommitmentKey::derive(seed),
            escrow: EscrowKeyPair::generate(&mut escrow_rng),
            users: BTreeMap::new(),
            aka_list: AuthorizedList::new(),
            links: BTreeMap::new(),
            directory: NetworkDirectory::default(),
        }
    }

    pub fn crs(&self) -> &Crs {
        &self.crs
    }

    pub fn trapdoor(&self) -> &CrsTrapdoor {
        &self.td
    }

    pub fn commitment_key(&self) -> &CommitmentKey {
        &self.ck
    }

    pub fn aka_list(&self) -> &AuthorizedList {
        &self.aka_list
    }

    pub fn directory(&self) -> &NetworkDirectory {
        &self.directory
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn export_params(&self) -> SystemParams {
        SystemParams {
            crs: self.crs.clone(),
            ck: self.ck.clone(),
            escrow_key: *self.escrow.public(),
            aka_list: self.aka_list.clone(),
        }
    }

    pub fn install_network_keys(&mut self, directory: NetworkDirectory) {
        self.directory = directory;
    }

    pub fn register_user<R: CryptoRngCore + ?Sized>(
        &mut self,
        real_identity: &[u8],
        rng: &mut R,
    ) -> Result<UserCredential, ProtocolError> {
        if self.users.contains_key(real_identity) {
            return Err(ProtocolError::DuplicateUser);
        }
        let pid = random_scalar(rng);
        self.aka_list
            .push(make_tag(&pid))
            .map_err(|_| ProtocolError::DuplicateUser)?;
        self.users.insert(real_identity.to_vec(), pid);
        Ok(UserCredential {
            pid,
            crs: self.crs.clone(),
            ck: self.ck.clone(),
            escrow_key: *self.escrow.public(),
            aka_list: self.aka_list.clone(),
            directory: self.directory.clone(),
        })
    }

    /// Links a newly issued UID to the pseudonym escrowed in its request.
    pub fn record_issuance(&mut self, report: &EscrowReport) -> Result<(), ProtocolError> {
        let pid_tag = self.escrow.open(&report.escrow);
        if !self.aka_list.contains(&pid_tag) {
            return Err(ProtocolError::UnknownTag);
        }
        self.links
            .entry(pid_tag)
            .or_default()
            .insert(report.uid_tag);
        Ok(())
    }

    pub fn revoke_user(&mut self, real_identity: &[u8]) -> Result<RevocationNotice, ProtocolError> {
        let mut pid = self
            .users
            .remove(real_identity)
            .ok_or(ProtocolError::UnknownUser)?;
        let pid_tag = make_tag(&pid);
        pid.zeroize();
        self.aka_list
            .remove(&pid_tag)
            .map_err(|_| ProtocolError::UnknownTag)?;
        let uid_tags = self
            .links
            .remove(&pid_tag)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        Ok(RevocationNotice { pid_tag, uid_tags })
    }
}

/// Registration-time exchange: the CN receives the CRS, commitment key and
/// AKA list; the MVNO receives the operator's public keys and enrols every
/// registered gNB with the CN. Safe to call again to propagate updates.
pub fn exchange_params(mvno: &mut Mvno, mno: &Mno, cn: &mut Cn) -> Result<(), ProtocolError> {
    cn.install_params(mvno.export_params())?;
    let directory = mno.directory();
    for (id, public) in &directory.gnbs {
        cn.enroll_gnb(id, *public);
    }
    mvno.install_network_keys(directory);
    Ok(())
}
