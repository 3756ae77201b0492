use serde::Serialize;
use thiserror::Error;

use super::AdversaryScript;
use crate::protocol::ProtocolConfig;
use crate::zk::MAX_LIST_LEN;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Features {
    pub session_keys: bool,
}

/// One scripted action of a scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Step {
    Aka {
        ue: usize,
        gnb: usize,
    },
    Handover {
        ue: usize,
        gnb: usize,
    },
    Revoke {
        ue: usize,
    },
    /// Let logical time pass.
    Advance {
        ms: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_ues: usize,
    pub n_gnbs: usize,
    /// Both authorized lists are padded with decoy entries up to this size.
    pub list_size: usize,
    pub skew_ms: u64,
    pub features: Features,
    pub adversary: AdversaryScript,
    /// `None` runs one AKA per UE followed by one handover per UE to the
    /// next cell.
    pub steps: Option<Vec<Step>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_ues: 1,
            n_gnbs: 2,
            list_size: 8,
            skew_ms: 5_000,
            features: Features::default(),
            adversary: AdversaryScript::passive(),
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid config: {0}")]
pub struct ConfigInvalid(pub String);

fn bad(msg: impl Into<String>) -> ConfigInvalid {
    ConfigInvalid(msg.into())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        if self.n_ues == 0 {
            return Err(bad("ues must be at least 1"));
        }
        if self.n_gnbs == 0 {
            return Err(bad("gnbs must be at least 1"));
        }
        if self.list_size == 0 || self.list_size > MAX_LIST_LEN {
            return Err(bad(format!("list-size must be in 1..={MAX_LIST_LEN}")));
        }
        if self.n_ues > self.list_size {
            return Err(bad("list-size must be at least the number of ues"));
        }
        if self.skew_ms == 0 {
            return Err(bad("skew-ms must be positive"));
        }
        for s in self.steps.iter().flatten() {
            let (ue, gnb) = match *s {
                Step::Aka { ue, gnb } | Step::Handover { ue, gnb } => (ue, Some(gnb)),
                Step::Revoke { ue } => (ue, None),
                Step::Advance { .. } => continue,
            };
            if ue >= self.n_ues || gnb.is_some_and(|g| g >= self.n_gnbs) {
                return Err(bad(format!("step {s:?} names a missing entity")));
            }
        }
        Ok(())
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            skew_ms: self.skew_ms,
            session_keys: self.features.session_keys,
            ..ProtocolConfig::default()
        }
    }

    pub fn default_steps(&self) -> Vec<Step> {
        let g = self.n_gnbs;
        let mut steps: Vec<Step> = (0..self.n_ues)
            .map(|ue| Step::Aka { ue, gnb: ue % g })
            .collect();
        steps.extend((0..self.n_ues).map(|ue| Step::Handover {
            ue,
            gnb: (ue + 1) % g,
        }));
        steps
    }

    pub fn steps(&self) -> Vec<Step> {
        self.steps.clone().unwrap_or_else(|| self.default_steps())
    }

    /// Applies one `key = value` setting. Keys mirror the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigInvalid> {
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, ConfigInvalid> {
            v.parse()
                .map_err(|_| bad(format!("{k}: not a number: {v:?}")))
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "ues" => self.n_ues = num(key, value)?,
            "gnbs" => self.n_gnbs = num(key, value)?,
            "list-size" => self.list_size = num(key, value)?,
            "skew-ms" => self.skew_ms = num(key, value)?,
            "features" => {
                self.features = Features::default();
                for f in value.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                    match f {
                        "session-keys" => self.features.session_keys = true,
                        _ => return Err(bad(format!("unknown feature {f:?}"))),
                    }
                }
            }
            _ => return Err(bad(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Reads flat `key = value` text on top of the defaults. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ConfigInvalid> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_flat_text() {
        let c = ScenarioConfig::parse(
            "# demo\nseed = 9\nues=3\nlist-size = 16\nfeatures = session-keys\n",
        )
        .unwrap();
        assert_eq!((c.seed, c.n_ues, c.list_size), (9, 3, 16));
        assert!(c.features.session_keys);
        assert!(ScenarioConfig::parse("ues = 0").is_err());
        assert!(ScenarioConfig::parse("colour = red").is_err());
        assert!(ScenarioConfig::parse("ues = 9\nlist-size = 4").is_err());
        assert!(ScenarioConfig::parse("seed").is_err());
    }

    #[test]
    fn default_plan() {
        let c = ScenarioConfig {
            n_ues: 3,
            ..Default::default()
        };
        assert_eq!(
            c.steps(),
            vec![
                Step::Aka { ue: 0, gnb: 0 },
                Step::Aka { ue: 1, gnb: 1 },
                Step::Aka { ue: 2, gnb: 0 },
                Step::Handover { ue: 0, gnb: 1 },
                Step::Handover { ue: 1, gnb: 0 },
                Step::Handover { ue: 2, gnb: 1 },
            ]
        );
    }
}
