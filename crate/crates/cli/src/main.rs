use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsd_core::{ErrorKind, NoiseMode, NoiseModel};

mod cluster;
mod measure;
mod output;
mod reproduce;

#[derive(Parser)]
#[command(name = "hsd", version, about = "Hilbert-Schmidt distance between two-qubit states, simulated and exact")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trials per POVM setting in the stochastic noise modes.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, global = true, value_enum, default_value_t = NoiseArg::Exact)]
    pub noise: NoiseArg,
    /// Treat the II coincidence rate as known instead of measuring it.
    #[arg(long, global = true)]
    pub known_rate: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for output files. Reports go to stdout when omitted.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Exact,
    Binomial,
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Common {
    pub fn noise(&self) -> NoiseModel {
        let mode = match self.noise {
            NoiseArg::Exact => NoiseMode::Exact,
            NoiseArg::Binomial => NoiseMode::Binomial,
            NoiseArg::Poisson => NoiseMode::Poisson,
        };
        NoiseModel { mode, shots: self.shots, seed: self.seed, known_rate: self.known_rate }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two states, from the matrix oracle or the overlap measurement.
    Distance(measure::DistanceArgs),
    /// Overlap Tr(ρ₁ρ₂) between two states.
    Overlap(measure::PairArgs),
    /// Full simulated measurement with per-POVM counts.
    Simulate(measure::PairArgs),
    /// Settings needed for one distance: overlap scheme vs tomography.
    Plan(measure::PlanArgs),
    /// k-means over a CSV point cloud.
    Cluster(cluster::ClusterArgs),
    /// Regenerate distance tables, parameter grids and the clustering demo.
    Reproduce(reproduce::ReproduceArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<hsd_core::Error>() {
            return match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Estimation => 3,
                ErrorKind::Io => 4,
            };
        }
        if cause.is::<std::io::Error>() {
            return 4;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Distance(args) => measure::distance(args, &cli.common),
        Command::Overlap(args) => measure::overlap(args, &cli.common),
        Command::Simulate(args) => measure::simulate(args, &cli.common),
        Command::Plan(args) => measure::plan(args, &cli.common),
        Command::Cluster(args) => cluster::run(args, &cli.common),
        Command::Reproduce(args) => reproduce::run(args, &cli.common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let input = anyhow::Error::from(hsd_core::Error::InvalidInput("x".into())).context("outer");
        assert_eq!(exit_code(&input), 2);
        assert_eq!(exit_code(&anyhow::Error::from(hsd_core::Error::Estimation("x".into()))), 3);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(exit_code(&anyhow::Error::from(hsd_core::Error::from(io))), 4);
        let raw = std::io::Error::new(std::io::ErrorKind::PermissionDenied, "no");
        assert_eq!(exit_code(&anyhow::Error::from(raw).context("writing")), 4);
    }

    #[test]
    fn noise_flags() {
        let cli = Cli::parse_from(["hsd", "--noise", "poisson", "--shots", "10", "--known-rate", "plan"]);
        let noise = cli.common.noise();
        assert_eq!(noise.mode, NoiseMode::Poisson);
        assert_eq!((noise.shots, noise.seed, noise.known_rate), (10, 0, true));
    }
}
