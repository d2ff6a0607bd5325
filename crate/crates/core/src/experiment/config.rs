use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::craft::CraftConfig;
use crate::error::{Error, Result};
use crate::exbmdp::Agent;
use crate::hypotheses::MAX_RELABEL_WIDTH;
use crate::toy::ToyEnvConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technique {
    Craft,
    Draft,
    SingleObs,
    PairedObs,
}

impl Technique {
    /// The three techniques compared on the toy benchmark.
    pub const TABLE: [Technique; 3] = [Technique::Craft, Technique::SingleObs, Technique::PairedObs];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Craft => "craft",
            Technique::Draft => "draft",
            Technique::SingleObs => "single-obs",
            Technique::PairedObs => "paired-obs",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Technique::Craft,
            Technique::Draft,
            Technique::SingleObs,
            Technique::PairedObs,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown technique `{s}`")))
    }
}

fn default_agents() -> Vec<Agent> {
    vec![Agent::A, Agent::B]
}

fn default_n() -> usize {
    1000
}

fn default_stay() -> f64 {
    0.75
}

/// Data collection: agent A acts uniformly, agent B keeps its state with probability `stay`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsConfig {
    #[serde(default = "default_agents")]
    pub generate: Vec<Agent>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stay")]
    pub stay: f64,
}

impl Default for AgentsConfig {
    fn default() -> Self {
        AgentsConfig {
            generate: default_agents(),
            n: default_n(),
            seed: 0,
            stay: default_stay(),
        }
    }
}

fn default_technique() -> Technique {
    Technique::Craft
}
fn default_alpha() -> f64 {
    CraftConfig::toy().alpha
}
fn default_eta() -> f64 {
    CraftConfig::toy().eta
}
fn default_nu() -> f64 {
    CraftConfig::toy().nu
}
/// The benchmark lets the learner discover more states than the environment
/// has, up to what the multiclass relabeling search supports; finite-sample
/// noise can split a true state in two.
fn default_max_states() -> usize {
    MAX_RELABEL_WIDTH
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoConfig {
    #[serde(default = "default_technique")]
    pub name: Technique,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_max_states")]
    pub max_states: usize,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            name: default_technique(),
            alpha: default_alpha(),
            eta: default_eta(),
            nu: default_nu(),
            max_states: default_max_states(),
        }
    }
}

impl AlgoConfig {
    pub fn craft(&self) -> CraftConfig {
        CraftConfig {
            alpha: self.alpha,
            eta: self.eta,
            nu: self.nu,
            max_states: self.max_states,
        }
    }
}

fn default_seeds() -> usize {
    20
}
fn default_sizes() -> Vec<usize> {
    vec![500, 1000, 5000]
}
fn default_eval_n() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Number of seeds for the benchmark sweep; seed `k` uses env seed
    /// `env.seed + k` and data seed `agents.seed + k`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    /// Size of the fresh labeled set used for empirical accuracy.
    #[serde(default = "default_eval_n")]
    pub eval_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seeds: default_seeds(),
            sizes: default_sizes(),
            eval_n: default_eval_n(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: ToyEnvConfig,
    #[serde(default)]
    pub agents: AgentsConfig,
    #[serde(default)]
    pub algo: AlgoConfig,
    #[serde(default)]
    pub run: RunConfig,
}

impl ExperimentConfig {
    /// The toy benchmark setup: `H = 30`, `M = 128`, toy bounds.
    pub fn table1() -> Self {
        ExperimentConfig {
            env: ToyEnvConfig {
                horizon: 30,
                width: 128,
                seed: 0,
            },
            agents: AgentsConfig::default(),
            algo: AlgoConfig::default(),
            run: RunConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.env.horizon < 2 || self.env.width < 2 {
            return bad(format!(
                "env needs H >= 2 and M >= 2, got H={} M={}",
                self.env.horizon, self.env.width
            ));
        }
        if self.agents.n == 0 {
            return bad("agents.n must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.agents.stay) {
            return bad(format!("agents.stay must lie in [0, 1], got {}", self.agents.stay));
        }
        if self.run.seeds == 0 || self.run.sizes.is_empty() || self.run.sizes.contains(&0) {
            return bad("run.seeds and run.sizes must be positive".into());
        }
        if self.run.eval_n == 0 {
            return bad("run.eval_n must be positive".into());
        }
        self.algo.craft().validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form of the parsed config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
