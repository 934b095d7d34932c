use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Link dimensioning and blocking analysis for LTE eNB meshes.
#[derive(Debug, Parser)]
#[command(name = "meshplan", version)]
pub struct Cli {
    /// TOML file with one section per subcommand; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum flow and minimum cut of a network file.
    Maxflow(MaxflowArgs),
    /// Smallest uniform link capacity that carries a mesh's offered load.
    Dimension(DimensionArgs),
    /// Erlang-B blocking for one traffic scenario.
    Blocking(BlockingArgs),
    /// Monte-Carlo loss-system simulation of a traffic scenario.
    Simulate(SimulateArgs),
    /// Evaluate a parameter sweep and emit CSV, JSON or SVG.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct MaxflowArgs {
    pub graph_file: PathBuf,
    /// ff, ek or dinic.
    #[arg(long)]
    pub engine: Option<String>,
    /// edge-list or json; detected from the content by default.
    #[arg(long)]
    pub input_format: Option<String>,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    pub mesh_file: PathBuf,
    /// Search step in kbps.
    #[arg(long)]
    pub granularity_kbps: Option<u64>,
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub input_format: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Number of users M.
    #[arg(long)]
    pub users: Option<u32>,
    /// Resource blocks per call m.
    #[arg(long)]
    pub rb_per_call: Option<u32>,
    /// Calls per user per minute, as a number or a ratio such as 1/60.
    #[arg(long)]
    pub rate: Option<String>,
    /// Mean holding time in minutes.
    #[arg(long)]
    pub holding: Option<f64>,
    /// qpsk or qam16.
    #[arg(long)]
    pub modulation: Option<String>,
    /// Per-subcarrier capacity in Mbps.
    #[arg(long)]
    pub capacity_mbps: Option<String>,
    /// Simultaneous RB count N, overriding the value derived from capacity.
    #[arg(long)]
    pub simultaneous_rb: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BlockingArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// table or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Symbol error rate to combine with blocking.
    #[arg(long, conflicts_with = "ser_snr_db")]
    pub ser: Option<f64>,
    /// Extension: derive the SER from an AWGN channel at this Es/N0 (dB).
    #[arg(long)]
    pub ser_snr_db: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Offered load in Erlangs, bypassing the scenario (needs --channels).
    #[arg(long, requires = "channels")]
    pub offered: Option<f64>,
    /// Channel count k, bypassing the scenario (needs --offered).
    #[arg(long, requires = "offered")]
    pub channels: Option<u64>,
    /// Calls generated per replication, warmup included.
    #[arg(long)]
    pub calls: Option<u64>,
    /// Leading calls of each replication left out of the statistics.
    #[arg(long)]
    pub warmup: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<u64>,
    /// exponential or deterministic.
    #[arg(long)]
    pub holding_dist: Option<String>,
    /// One arrival stream per user instead of a single aggregate stream.
    #[arg(long)]
    pub per_user: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec_file: PathBuf,
    /// csv, json or svg.
    #[arg(long)]
    pub format: Option<String>,
    /// Logarithmic y axis (svg only).
    #[arg(long)]
    pub log_y: bool,
    #[arg(long)]
    pub title: Option<String>,
    /// Write to a file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
