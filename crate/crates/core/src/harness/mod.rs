//! Simulation harness: a deterministic in-process network with a scriptable
//! Dolev-Yao adversary, canned attack scenarios, privacy experiments and a
//! benchmark reporter.
//!
//! ```no_run
//! use mvno_aka::harness::{run_scenario, ScenarioConfig};
//!
//! let t = run_scenario(&ScenarioConfig::default()).unwrap();
//! assert!(t.runs.iter().all(|r| r.accepted()));
//! print!("{}", t.to_hex_dump());
//! ```

use std::fmt;

use serde::Serialize;

mod adversary;
mod attacks;
pub mod bench;
pub mod cli;
mod config;
pub mod distinguish;
mod linkability;
mod network;
mod scenario;
mod transcript;
pub mod transport;

pub use adversary::{Action, AdversaryScript, ByteEdit, Matcher, Rule};
pub use attacks::{
    attack_fake_gnb, attack_replay, FakeGnbVerdict, ReplayCase, ReplayVerdict, Window,
};
pub use config::{ConfigInvalid, Features, ScenarioConfig, Step};
pub use linkability::{experiment_linkability, observable_fields, LinkabilityReport, Protocol};
pub use network::{World, HOP_MS, T0};
pub use scenario::{run_scenario, scan_for_identities, suite, SuiteEntry};
pub use transcript::{
    Disposition, Event, Note, Outcome, RunKind, RunRecord, RunStatus, Transcript, OPERATIONS,
};

/// An endpoint on the simulated network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeId {
    Ue(usize),
    Gnb(usize),
    Cn,
    /// The adversary's own radio, for frames it originates.
    Adversary,
}

impl NodeId {
    pub fn is_network(self) -> bool {
        matches!(self, NodeId::Gnb(_) | NodeId::Cn)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Ue(i) => write!(f, "ue-{i}"),
            NodeId::Gnb(i) => write!(f, "gnb-{i}"),
            NodeId::Cn => f.write_str("cn"),
            NodeId::Adversary => f.write_str("adv"),
        }
    }
}
