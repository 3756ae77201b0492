//! Anonymous authentication for MVNO subscribers on infrastructure they do not own.
//!
//! A virtual operator (MVNO) registers its users under pseudo-identities and
//! publishes an authorized list of one-way identity tags. The host operator's
//! core network (CN) and base stations (gNBs) authenticate those users with a
//! zero-knowledge membership proof over that list, without learning who they
//! are. Base stations authenticate themselves to users with a sanitizable
//! certificate that the CN signs once and each gNB re-stamps per broadcast.
//! After the initial authentication the CN issues a universal ID that the user
//! later proves membership for during handover, which runs between UE and gNB
//! only.
//!
//! The crate is layered bottom-up:
//!
//! * [`primitives`]: Pedersen commitments, signatures, hybrid public-key
//!   encryption, a key-exposure-free chameleon hash and the sanitizable
//!   signature built on it.
//! * [`zk`]: the common reference string, identity tags, versioned authorized
//!   lists, the one-out-of-many membership proof and tag escrow.
//! * [`protocol`]: entity state machines for registration, initial
//!   authentication, handover and revocation.
//! * [`wire`]: canonical message encoding and framing into 5G carrier messages.
//! * [`harness`]: a deterministic simulated network with a Dolev-Yao adversary,
//!   attack scenarios, privacy experiments and a benchmark reporter.
//!
//! <div class="warning">
//! Research prototype. No constant-time hardening has been done.
//! </div>

pub mod harness;
pub mod primitives;
pub mod protocol;
pub mod wire;
pub mod zk;
