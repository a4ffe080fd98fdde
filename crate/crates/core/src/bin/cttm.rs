use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use cttm::encoding::TurnLabel;
use cttm::harness::{cohen_kappa, evaluate, gen_synthetic, render_raster, Dataset, EvalConfig, SyntheticConfig};
use cttm::pipeline::{CttmConfig, CttmModel};
use cttm::provenance::FoldTag;
use cttm::{CttmError, Result};

#[derive(Parser)]
#[command(name = "cttm", version, about = "Early turn-taking prediction with spiking networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multimodal turn-event dataset
    GenSynth(GenSynthArgs),
    /// Fit the full model on every event of a dataset
    Train(TrainArgs),
    /// Leave-one-subject-out evaluation of one or more methods
    Eval(EvalArgs),
    /// Render the firing raster of one event as a PPM image
    Raster(RasterArgs),
    /// Cohen's kappa between two label files
    Kappa(KappaArgs),
}

#[derive(Args)]
struct GenSynthArgs {
    /// Output dataset (.json or .csv)
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with generator settings
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Output model file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// STDP presentations per network
    #[arg(long)]
    presentations: Option<usize>,
    /// JSON file with model settings
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    /// Output directory for report.json and report.csv
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated methods: cttm, dtw, ishii
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    /// Comma-separated observation fractions in (0, 1]
    #[arg(long, value_delimiter = ',')]
    tau_grid: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    presentations: Option<usize>,
    /// JSON file with evaluation settings
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RasterArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    event: u64,
    /// Index of the selected feature network
    #[arg(long, default_value_t = 0)]
    channel: usize,
    /// Observed fraction of the event
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Output PPM image
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KappaArgs {
    /// File of 0/1 labels separated by whitespace or commas
    a: PathBuf,
    b: PathBuf,
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(T::default()),
    }
}

fn read_labels(path: &Path) -> Result<Vec<TurnLabel>> {
    std::fs::read_to_string(path)?
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v: u8 = s
                .parse()
                .map_err(|_| CttmError::InvalidInput(format!("{}: '{s}' is not a label", path.display())))?;
            TurnLabel::try_from(v)
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSynth(a) => {
            let mut cfg: SyntheticConfig = read_config(a.config.as_deref())?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            let ds = gen_synthetic(&cfg)?;
            ds.save(&a.out)?;
            let (give, keep) = ds.label_counts();
            println!("wrote {} events ({give} give, {keep} keep) to {}", ds.events.len(), a.out.display());
        }
        Command::Train(a) => {
            let mut cfg: CttmConfig = read_config(a.config.as_deref())?;
            if let Some(p) = a.presentations {
                cfg.presentations = p;
            }
            let ds = Dataset::load(&a.data)?;
            let train: Vec<_> = ds.events.iter().collect();
            let model = CttmModel::fit(&train, &cfg, a.seed, FoldTag::new(None, ds.subjects()))?;
            model.save(&a.out)?;
            println!(
                "trained on {} events; classifier {:?}; saved {}",
                train.len(),
                model.classifier.params,
                a.out.display()
            );
        }
        Command::Eval(a) => {
            let mut cfg: EvalConfig = read_config(a.config.as_deref())?;
            if let Some(m) = a.method {
                cfg.methods = m;
            }
            if let Some(t) = a.tau_grid {
                cfg.taus = t;
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if let Some(p) = a.presentations {
                cfg.cttm.presentations = p;
            }
            cfg.build_methods()?;
            let ds = Dataset::load(&a.data)?;
            let report = evaluate(&ds, &cfg)?;
            std::fs::create_dir_all(&a.out)?;
            report.save_json(&a.out.join("report.json"))?;
            report.save_csv(&a.out.join("report.csv"))?;
            for m in &report.methods {
                let curve: Vec<String> = m.taus.iter().map(|t| format!("{}:{:.3}", t.tau, t.f1)).collect();
                println!("{} F1 {}", m.method, curve.join(" "));
            }
        }
        Command::Raster(a) => {
            let model = CttmModel::load(&a.model)?;
            let ds = Dataset::load(&a.data)?;
            let event = ds
                .event(a.event)
                .ok_or_else(|| CttmError::InvalidInput(format!("no event with id {}", a.event)))?
                .truncate(a.tau)?;
            let maps = model.firing_maps(&event)?;
            let map = maps.get(a.channel).ok_or_else(|| {
                CttmError::InvalidInput(format!("channel {} out of range (model has {})", a.channel, maps.len()))
            })?;
            render_raster(map, &a.out)?;
            println!("{} firings rendered to {}", map.firing_count(), a.out.display());
        }
        Command::Kappa(a) => {
            let k = cohen_kappa(&read_labels(&a.a)?, &read_labels(&a.b)?)?;
            println!("{k}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
