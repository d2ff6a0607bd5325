use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use craft_core::exbmdp::format::{read_dataset, write_dataset};
use craft_core::exbmdp::{check_assumptions, Agent, AssumptionBounds, TrajectoryDataset};
use craft_core::experiment::{
    agent_seed, generate_agent, reproduce_table1, run_manifest, ExperimentConfig, RunManifest, Technique,
};
use craft_core::toy::ToyEnv;
use craft_core::Error;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "craft",
    version,
    about = "Latent-state discovery experiments on exogenous block MDPs"
)]
struct Cli {
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Pair {
    /// Dataset collected by agent A
    #[arg(long = "a")]
    a: PathBuf,
    /// Dataset collected by agent B
    #[arg(long = "b")]
    b: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate toy-environment datasets for the configured agents
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `agents.seed`
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one technique on a pair of datasets
    Run {
        /// craft, draft, single-obs or paired-obs
        technique: String,
        #[command(flatten)]
        data: Pair,
        #[arg(long)]
        config: PathBuf,
        /// Where to write the run manifest (JSON)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-seed toy benchmark over several dataset sizes
    #[command(name = "reproduce-table1")]
    ReproduceTable1 {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `run.seeds`
        #[arg(long)]
        seeds: Option<usize>,
        /// Overrides `run.sizes`, comma separated
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Overrides both `env.seed` and `agents.seed`
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for table.csv, trials.csv and table.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate coverage and separation constants from two labeled datasets
    #[command(name = "check-assumptions")]
    CheckAssumptions {
        #[command(flatten)]
        data: Pair,
        /// Bounds to check against, from `[algo]`
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a run manifest
    Inspect { manifest: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidSpec(_) => 2,
        Error::Data(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 3,
        Error::Precondition(_) => 4,
    }
}

fn load(path: &Path) -> Result<TrajectoryDataset, Error> {
    let file = fs::File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_dataset(BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, message } => Error::Data(format!("{}: line {line}: {message}", path.display())),
        other => other,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display())))
}

fn generate(config: &Path, seed: Option<u64>, out: &Path) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.agents.seed = s;
    }
    let env = ToyEnv::from_config(&cfg.env)?;
    fs::create_dir_all(out).map_err(|e| Error::Data(format!("cannot create {}: {e}", out.display())))?;
    let mut files = Vec::new();
    for &agent in &cfg.agents.generate {
        let seed = agent_seed(cfg.agents.seed, agent);
        let ds = generate_agent(&env, agent, cfg.agents.n, seed, cfg.agents.stay)?;
        let path = out.join(format!("agent_{agent}.exbmdp"));
        let file = fs::File::create(&path).map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display())))?;
        write_dataset(&ds, BufWriter::new(file))?;
        println!("wrote {} ({} trajectories)", path.display(), ds.len());
        files
            .push(json!({ "agent": agent, "path": path.file_name().unwrap().to_string_lossy(), "dataset_seed": seed }));
    }
    let manifest = json!({
        "config_hash": cfg.hash(),
        "config": cfg,
        "env_seed": cfg.env.seed,
        "data_seed": cfg.agents.seed,
        "files": files,
    });
    write_text(
        &out.join("generate_manifest.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )
}

fn run(technique: &str, data: &Pair, config: &Path, out: Option<&Path>) -> Result<(), Error> {
    let cfg = ExperimentConfig::load(config)?;
    let technique: Technique = technique.parse()?;
    let (a, b) = (load(&data.a)?, load(&data.b)?);
    if a.horizon() != b.horizon() || a.obs_len() != b.obs_len() {
        return Err(Error::Data(format!(
            "datasets disagree: A has H={} obslen={}, B has H={} obslen={}",
            a.horizon(),
            a.obs_len(),
            b.horizon(),
            b.obs_len()
        )));
    }
    let manifest = run_manifest(&cfg, technique, &a, &b)?;
    print!("{}", manifest.summary());
    if let Some(path) = out {
        write_text(path, &serde_json::to_string_pretty(&manifest)?)?;
    }
    Ok(())
}

fn reproduce(
    config: Option<&Path>,
    seeds: Option<usize>,
    sizes: Option<Vec<usize>>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), Error> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::table1(),
    };
    if let Some(n) = seeds {
        cfg.run.seeds = n;
    }
    if let Some(s) = sizes {
        cfg.run.sizes = s;
    }
    if let Some(s) = seed {
        cfg.env.seed = s;
        cfg.agents.seed = s;
    }
    cfg.validate()?;
    let table = reproduce_table1(&cfg)?;
    fs::create_dir_all(out).map_err(|e| Error::Data(format!("cannot create {}: {e}", out.display())))?;
    write_text(&out.join("table.csv"), &table.to_csv())?;
    write_text(&out.join("trials.csv"), &table.trials_csv())?;
    write_text(&out.join("table.json"), &table.to_json())?;
    print!("{}", table.to_csv());
    if table.low_confidence {
        eprintln!("warning: a single seed gives no standard error; treat the table as low confidence");
    }
    Ok(())
}

fn assumptions(data: &Pair, config: Option<&Path>, out: Option<&Path>) -> Result<(), Error> {
    let bounds = match config {
        Some(p) => {
            let cfg = ExperimentConfig::load(p)?;
            Some(AssumptionBounds {
                nu: cfg.algo.nu,
                eta: cfg.algo.eta,
                alpha: cfg.algo.alpha,
            })
        }
        None => None,
    };
    let (a, b) = (load(&data.a)?, load(&data.b)?);
    if a.agent() != Agent::A || b.agent() != Agent::B {
        eprintln!("warning: dataset headers name agents {} and {}", a.agent(), b.agent());
    }
    let report = check_assumptions(&a, &b, bounds)?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(path) = out {
        write_text(path, &text)?;
    }
    Ok(())
}

fn inspect(path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    print!("{}", manifest.summary());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Generate { config, seed, out } => generate(config, *seed, out),
        Command::Run {
            technique,
            data,
            config,
            out,
        } => run(technique, data, config, out.as_deref()),
        Command::ReproduceTable1 {
            config,
            seeds,
            sizes,
            seed,
            out,
        } => reproduce(config.as_deref(), *seeds, sizes.clone(), *seed, out),
        Command::CheckAssumptions { data, config, out } => assumptions(data, config.as_deref(), out.as_deref()),
        Command::Inspect { manifest } => inspect(manifest),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
