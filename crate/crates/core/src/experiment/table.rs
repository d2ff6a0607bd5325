use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Technique};
use super::trial::{agent_seed, fit, generate_agent};
use crate::craft::{preprocess, PreprocessedParams};
use crate::error::Result;
use crate::exbmdp::Agent;
use crate::toy::{ToyEnv, ToyEnvConfig};

/// One technique on one seed at one dataset size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed_index: usize,
    pub env_seed: u64,
    pub data_seed: u64,
    pub size: usize,
    pub technique: Technique,
    pub average_accuracy: Option<f64>,
    pub per_t: Option<Vec<Vec<f64>>>,
    /// CRAFT only: misassigned trajectories per timestep.
    pub misassigned: Option<Vec<usize>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub technique: Technique,
    pub size: usize,
    /// Mean over seeds that completed.
    pub mean: f64,
    /// Standard error of the mean; `None` with fewer than two completed seeds.
    pub std_error: Option<f64>,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub params: PreprocessedParams,
    pub low_confidence: bool,
    pub cells: Vec<BenchmarkCell>,
    pub trials: Vec<TrialRecord>,
}

fn run_seed(cfg: &ExperimentConfig, seed_index: usize, size: usize) -> Result<Vec<TrialRecord>> {
    let env_seed = cfg.env.seed.wrapping_add(seed_index as u64);
    let data_seed = cfg.agents.seed.wrapping_add(seed_index as u64);
    let env = ToyEnv::from_config(&ToyEnvConfig {
        seed: env_seed,
        ..cfg.env
    })?;
    let a = generate_agent(&env, Agent::A, size, agent_seed(data_seed, Agent::A), cfg.agents.stay)?;
    let b = generate_agent(&env, Agent::B, size, agent_seed(data_seed, Agent::B), cfg.agents.stay)?;
    let (fa, fb) = (a.strip_labels(), b.strip_labels());
    Technique::TABLE
        .iter()
        .map(|&technique| {
            let mut rec = TrialRecord {
                seed_index,
                env_seed,
                data_seed,
                size,
                technique,
                average_accuracy: None,
                per_t: None,
                misassigned: None,
                error: None,
            };
            match fit(technique, &fa, &fb, &cfg.algo) {
                Ok(fitted) => {
                    rec.average_accuracy = Some(fitted.average_population_accuracy(&env.params)?);
                    rec.per_t = Some(fitted.population_accuracy(&env.params)?);
                    rec.misassigned = fitted.misassigned(&a, &b)?;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            Ok(rec)
        })
        .collect()
}

/// Runs the three benchmark techniques over `run.seeds` seeds at every size
/// in `run.sizes`. Seeds run in parallel; results are ordered by size, seed
/// and technique, so the output depends only on the config.
pub fn reproduce_table1(cfg: &ExperimentConfig) -> Result<BenchmarkTable> {
    cfg.validate()?;
    let params = preprocess(&cfg.algo.craft())?;
    let jobs: Vec<(usize, usize)> = cfg
        .run
        .sizes
        .iter()
        .flat_map(|&size| (0..cfg.run.seeds).map(move |k| (size, k)))
        .collect();
    let per_job: Vec<Vec<TrialRecord>> = jobs
        .par_iter()
        .map(|&(size, k)| run_seed(cfg, k, size))
        .collect::<Result<_>>()?;
    let trials: Vec<TrialRecord> = per_job.into_iter().flatten().collect();

    let mut cells = Vec::new();
    for &technique in &Technique::TABLE {
        for &size in &cfg.run.sizes {
            let accs: Vec<f64> = trials
                .iter()
                .filter(|r| r.technique == technique && r.size == size)
                .filter_map(|r| r.average_accuracy)
                .collect();
            let failed = cfg.run.seeds - accs.len();
            let n = accs.len() as f64;
            let mean = if accs.is_empty() {
                f64::NAN
            } else {
                accs.iter().sum::<f64>() / n
            };
            let std_error = (accs.len() >= 2).then(|| {
                let var = accs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            });
            cells.push(BenchmarkCell {
                technique,
                size,
                mean,
                std_error,
                completed: accs.len(),
                failed,
            });
        }
    }
    Ok(BenchmarkTable {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        params,
        low_confidence: cfg.run.seeds < 2,
        cells,
        trials,
    })
}

impl BenchmarkTable {
    pub fn cell(&self, technique: Technique, size: usize) -> Option<&BenchmarkCell> {
        self.cells.iter().find(|c| c.technique == technique && c.size == size)
    }

    /// One row per cell: technique, size, mean, standard error, completed and failed seeds.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("technique,size,mean_accuracy,std_error,completed,failed,config_hash\n");
        for c in &self.cells {
            let se = c.std_error.map(|v| format!("{v:.6}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{:.6},{},{},{},{}",
                c.technique, c.size, c.mean, se, c.completed, c.failed, self.config_hash
            );
        }
        s
    }

    /// Per-trial rows carrying env seed, data seed, config hash and grid parameters.
    pub fn trials_csv(&self) -> String {
        let mut s = String::from(
            "technique,size,seed_index,env_seed,data_seed,accuracy,error,config_hash,n_xi,xi,eta_effective\n",
        );
        for r in &self.trials {
            let acc = r.average_accuracy.map(|v| format!("{v:.6}")).unwrap_or_default();
            let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{:.6}",
                r.technique,
                r.size,
                r.seed_index,
                r.env_seed,
                r.data_seed,
                acc,
                err,
                self.config_hash,
                self.params.n_xi,
                self.params.xi,
                self.params.eta_effective
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}
