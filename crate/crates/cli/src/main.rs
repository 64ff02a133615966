mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crednet::centrality::{Algorithm, NetworkKind};
use serde::Serialize;

/// Credibility inference on news-sharing networks.
#[derive(Debug, Parser)]
#[command(name = "crednet", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for walks and, outside deterministic mode, training.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Single-worker embedding training so reruns are bit-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,

    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Config override such as `node2vec.p=0.5`; may repeat.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse posts, apply activity filters, score and label accounts.
    Ingest(IngestArgs),
    /// Export a network as edge and node CSV files.
    Build(BuildArgs),
    /// Score every account of an algorithm's network with all known labels.
    Rank(RankArgs),
    /// Train node2vec embeddings and project them to 2-D.
    Embed(EmbedArgs),
    /// Cross-validate algorithms and write JSON and CSV reports.
    Evaluate(EvaluateArgs),
    /// Write a planted two-block dataset in the ingest input formats.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    #[arg(long)]
    pub posts: Option<PathBuf>,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long)]
    pub domain_map: Option<PathBuf>,
}

/// Records and credibilities written by `ingest`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub credibilities: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// `reshare`, `trust`, `bipartite` or `coshare`.
    #[arg(long, value_parser = parse_network)]
    pub network: NetworkKind,
    /// Keep the k-core; without a value uses the network's preset.
    #[arg(long, num_args = 0..=1, value_name = "K")]
    pub k_core: Option<Option<usize>>,
    /// Keep disparity-backbone edges; without a value uses the preset.
    #[arg(long, num_args = 0..=1, value_name = "SIGNIFICANCE")]
    pub backbone: Option<Option<f64>>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    /// `reshare` or `coshare`.
    #[arg(long, value_parser = parse_network, default_value = "reshare")]
    pub network: NetworkKind,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    /// Comma-separated algorithm names or `all`; defaults to the config.
    #[arg(long)]
    pub algorithms: Option<String>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// Overrides `synthetic.mu`.
    #[arg(long)]
    pub mu: Option<f64>,
}

fn parse_network(s: &str) -> Result<NetworkKind, String> {
    s.parse().map_err(|e: crednet::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: crednet::Error| e.to_string())
}

/// Incompatible data or algorithm choices exit with 3; everything else
/// the user can fix in their inputs or config exits with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    let incompatible = err.chain().any(|c| {
        matches!(
            c.downcast_ref::<crednet::Error>(),
            Some(crednet::Error::NotApplicable(_))
        )
    });
    if incompatible {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let result = commands::Context::new(&cli.global).and_then(|ctx| match &cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Build(a) => commands::build(&ctx, a),
        Command::Rank(a) => commands::rank(&ctx, a),
        Command::Embed(a) => commands::embed(&ctx, a),
        Command::Evaluate(a) => commands::evaluate(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
