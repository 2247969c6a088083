//! `heatmap-tsp`: instance generation, heat-map optimization, guided search,
//! exact and heuristic references, and seeded benchmark runs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heatmap_tsp::Preset;

#[derive(Debug, Parser)]
#[command(name = "heatmap-tsp", version, about = "Heat-map guided k-opt search for the Euclidean TSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a uniform random instance in the unit square.
    Generate(GenerateArgs),
    /// Optimize a heat map for one instance.
    TrainHeatmap(TrainHeatmapArgs),
    /// Run the guided search from an existing heat-map file.
    Search(SearchArgs),
    /// Heat-map optimization followed by the guided search.
    Solve(SolveArgs),
    /// Exact optimum by dynamic programming (at most 18 cities).
    Oracle(OracleArgs),
    /// Nearest-neighbour tour improved by 2-opt.
    Baseline(BaselineArgs),
    /// Coverage of optimal tour edges by pruned heat maps.
    Coverage(CoverageArgs),
    /// Pipeline against the baseline (and the exact optimum when small).
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InstanceInput {
    /// Instance file, native or TSPLIB EUC_2D.
    #[arg(long)]
    pub instance: PathBuf,
    /// Use TSPLIB nearest-integer distances instead of exact Euclidean ones.
    #[arg(long)]
    pub tsplib_round: bool,
}

#[derive(Debug, Args)]
pub struct TrainOptions {
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub init_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SearchOptions {
    /// Search parameters; picked from the instance size when omitted.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Cap on restart rounds.
    #[arg(long)]
    pub rounds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportOptions {
    /// Where to write the resulting tour file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render the tour as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Format of the result record on stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write TSPLIB instead of the native format.
    #[arg(long)]
    pub tsplib: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainHeatmapArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub train: TrainOptions,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Heat-map file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-step loss trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub input: InstanceInput,
    #[arg(long)]
    pub heatmap: PathBuf,
    #[command(flatten)]
    pub search: SearchOptions,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: ReportOptions,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InstanceInput,
    #[command(flatten)]
    pub train: TrainOptions,
    #[command(flatten)]
    pub search: SearchOptions,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: ReportOptions,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InstanceInput,
    #[command(flatten)]
    pub report: ReportOptions,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub input: InstanceInput,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restart from fresh start cities until this many seconds pass.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Number of restarts.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[command(flatten)]
    pub report: ReportOptions,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Cities per generated instance (exact truth needs at most 18).
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Candidates kept per city.
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    /// Base seed; instance `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measure untrained random-logit heat maps instead.
    #[arg(long)]
    pub random_logits: bool,
    #[command(flatten)]
    pub train: TrainOptions,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Base seed; instance `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub train: TrainOptions,
    #[command(flatten)]
    pub search: SearchOptions,
    /// Worker threads; instances are independent.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: heatmap_tsp::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::TrainHeatmap(a) => commands::train_heatmap(a),
        Command::Search(a) => commands::search(a),
        Command::Solve(a) => commands::solve(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Coverage(a) => commands::coverage(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
