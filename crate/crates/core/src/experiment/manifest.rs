use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Technique};
use super::trial::{eval_seed, fit, generate_agent, Fitted};
use crate::error::Result;
use crate::eval::{average_accuracy, LabelAccuracy};
use crate::exbmdp::{Agent, TrajectoryDataset};
use crate::toy::ToyEnv;

/// Everything needed to audit one run: the config echo and its hash, the
/// returned encoders with the technique's own diagnostics, and accuracies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub technique: Technique,
    pub env_seed: u64,
    pub data_seed: u64,
    pub n_a: usize,
    pub n_b: usize,
    pub population_accuracy: Option<Vec<Vec<f64>>>,
    pub average_population_accuracy: Option<f64>,
    /// On a fresh labeled set drawn from agent A.
    pub empirical_accuracy: Option<Vec<Vec<LabelAccuracy>>>,
    pub average_empirical_accuracy: Option<f64>,
    pub misassigned: Option<Vec<usize>>,
    pub fitted: Fitted,
}

/// Fits `technique` on the two datasets. Accuracies are filled in when the
/// data has the shape of the configured toy environment.
pub fn run_manifest(
    cfg: &ExperimentConfig,
    technique: Technique,
    a: &TrajectoryDataset,
    b: &TrajectoryDataset,
) -> Result<RunManifest> {
    let fitted = fit(technique, &a.strip_labels(), &b.strip_labels(), &cfg.algo)?;
    let mut m = RunManifest {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        technique,
        env_seed: cfg.env.seed,
        data_seed: cfg.agents.seed,
        n_a: a.len(),
        n_b: b.len(),
        population_accuracy: None,
        average_population_accuracy: None,
        empirical_accuracy: None,
        average_empirical_accuracy: None,
        misassigned: None,
        fitted,
    };
    if a.is_labeled() && b.is_labeled() {
        m.misassigned = m.fitted.misassigned(a, b)?;
    }
    if a.horizon() == cfg.env.horizon && a.obs_len() == cfg.env.width {
        let env = ToyEnv::from_config(&cfg.env)?;
        let pop = m.fitted.population_accuracy(&env.params)?;
        m.average_population_accuracy = Some(average_accuracy(&pop, m.fitted.is_paired())?);
        m.population_accuracy = Some(pop);
        let held_out = generate_agent(
            &env,
            Agent::A,
            cfg.run.eval_n,
            eval_seed(cfg.agents.seed),
            cfg.agents.stay,
        )?;
        let emp = m.fitted.empirical_accuracy(&held_out)?;
        let means: Vec<Vec<f64>> = emp.iter().map(|v| v.iter().map(|x| x.mean).collect()).collect();
        m.average_empirical_accuracy = Some(average_accuracy(&means, m.fitted.is_paired())?);
        m.empirical_accuracy = Some(emp);
    }
    Ok(m)
}

impl RunManifest {
    /// Human-readable overview.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "technique     {}", self.technique);
        let _ = writeln!(s, "config hash   {}", self.config_hash);
        let _ = writeln!(
            s,
            "env           H={} M={} seed={}",
            self.config.env.horizon, self.config.env.width, self.env_seed
        );
        let _ = writeln!(
            s,
            "data          seed={} |A|={} |B|={}",
            self.data_seed, self.n_a, self.n_b
        );
        if let Some(p) = &self.fitted.params {
            let _ = writeln!(
                s,
                "grid          n_xi={} xi={} eta_eff={:.5}",
                p.n_xi, p.xi, p.eta_effective
            );
        }
        if let Some(acc) = self.average_population_accuracy {
            let _ = writeln!(s, "population    {:.4}", acc);
        }
        if let Some(acc) = self.average_empirical_accuracy {
            let _ = writeln!(s, "empirical     {:.4}", acc);
        }
        if let Some(out) = &self.fitted.craft {
            let sizes: Vec<usize> = out.assignment.steps.iter().map(|s| s.len()).collect();
            let _ = writeln!(s, "states per t  {sizes:?}");
            let merges: usize = out
                .steps
                .iter()
                .map(|d| d.merges.iter().filter(|m| m.merged).count())
                .sum();
            let _ = writeln!(s, "merges        {merges}");
            for w in &out.warnings {
                let _ = writeln!(s, "warning       {w}");
            }
        }
        if let Some(mis) = &self.misassigned {
            let _ = writeln!(s, "misassigned   {mis:?}");
        }
        for (t, encs) in self.fitted.encoders.iter().enumerate() {
            let pop = self.population_accuracy.as_ref().map(|p| &p[t]);
            let _ = writeln!(
                s,
                "t={t:<3} {encs:?} {}",
                pop.map(|p| format!("{p:?}")).unwrap_or_default()
            );
        }
        s
    }
}
