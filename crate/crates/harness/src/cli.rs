//! Argument parsing and the process-level entry point.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use crate::error::HarnessResult;
use crate::experiments;

#[derive(Debug, Parser)]
#[command(name = "sawtooth", version, about = "Quantum sawtooth-map entanglement experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One evolution with its decay fit.
    Single(RunArgs),
    /// Decay rate against the chaos parameter, compared with classical D0.
    GammaVsK(RunArgs),
    /// Residual concurrence against the conductance.
    ResidualVsG(RunArgs),
    /// Noise-induced decay rate for one parameter set.
    NoiseSingle(RunArgs),
    /// Noise-induced decay rate over an eps × n_q grid.
    NoiseScaling(RunArgs),
    /// Classical diffusion rate D0(K).
    ClassicalD0(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Single(a) => (ExperimentKind::SingleRun, a),
            Command::GammaVsK(a) => (ExperimentKind::GammaVsK, a),
            Command::ResidualVsG(a) => (ExperimentKind::ResidualVsG, a),
            Command::NoiseSingle(a) => (ExperimentKind::NoiseSingle, a),
            Command::NoiseScaling(a) => (ExperimentKind::NoiseScaling, a),
            Command::ClassicalD0(a) => (ExperimentKind::ClassicalD0, a),
        }
    }
}

/// Overrides on top of the per-experiment defaults. List flags take
/// comma-separated values.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Qubit counts.
    #[arg(long = "nq", value_delimiter = ',')]
    pub n_q: Option<Vec<usize>>,
    /// Chaos parameters K.
    #[arg(long = "K", value_delimiter = ',', allow_negative_numbers = true)]
    pub chaos: Option<Vec<f64>>,
    /// Cell counts L (multiples of 4).
    #[arg(long = "L", value_delimiter = ',')]
    pub cells: Option<Vec<u32>>,
    /// Number of map steps.
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Gate noise amplitudes.
    #[arg(long = "eps", value_delimiter = ',', allow_negative_numbers = true)]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Plateau onset in steps (default: ceil(7/γ_c)).
    #[arg(long)]
    pub plateau_start: Option<u64>,
    /// Classical trajectories for D0.
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Last step of the classical variance fit.
    #[arg(long)]
    pub d0_t_max: Option<u64>,
    /// Moving window on the noisy/ideal ratio.
    #[arg(long)]
    pub ratio_window: Option<usize>,
    /// Smoothed ratio at which the noise fit stops (0 disables).
    #[arg(long)]
    pub ratio_floor: Option<f64>,
    /// Apply gate noise to QFT swaps as well.
    #[arg(long)]
    pub noisy_swaps: bool,
    /// Ceiling on t_max · 2^n_q per run.
    #[arg(long)]
    pub op_budget: Option<f64>,
}

impl RunArgs {
    pub fn into_config(self, kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind);
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { c.$target = v; })*
            };
        }
        set!(n_q => n_q, chaos => chaos, cells => cells, t_max => t_max, epsilon => epsilon,
             realizations => realizations, seed => seed, out => output, format => format,
             workers => workers, trajectories => trajectories, d0_t_max => d0_t_max,
             ratio_window => ratio_window, ratio_floor => ratio_floor, op_budget => op_budget);
        c.plateau_start = self.plateau_start.or(c.plateau_start);
        c.noisy_swaps |= self.noisy_swaps;
        c
    }
}

fn describe(cfg: &ExperimentConfig) -> HarnessResult<()> {
    let manifest = experiments::run(cfg)?;
    println!("{:?} finished in {:.1} s", cfg.kind, manifest.wall_seconds);
    println!("config hash {}", manifest.config_hash);
    for f in &manifest.outputs {
        println!("  {}", cfg.output.join(&f.path).display());
    }
    for n in &manifest.notices {
        println!("notice: {n}");
    }
    Ok(())
}

/// Parses `args`, runs the experiment and returns the process exit code:
/// 0 on success, 1 for invalid arguments or configuration, 2 when the run
/// itself fails.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    let cfg = args.into_config(kind);
    match describe(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "sawtooth", "noise-scaling", "--nq", "6,7", "--eps", "0.01,0.02", "--K", "0.7", "--L", "8", "--t-max",
            "300", "--realizations", "3", "--seed", "9", "--out", "x", "--format", "json", "--workers", "2",
            "--noisy-swaps",
        ])
        .unwrap();
        let (kind, a) = cli.command.split();
        let c = a.into_config(kind);
        assert_eq!(c.kind, ExperimentKind::NoiseScaling);
        assert_eq!(c.n_q, vec![6, 7]);
        assert_eq!(c.epsilon, vec![0.01, 0.02]);
        assert_eq!((c.chaos[0], c.cells[0], c.t_max, c.realizations, c.seed), (0.7, 8, 300, 3, 9));
        assert_eq!((c.format, c.workers, c.noisy_swaps), (OutputFormat::Json, 2, true));
        assert_eq!(c.output, PathBuf::from("x"));
    }

    #[test]
    fn defaults_follow_subcommand() {
        let cli = Cli::try_parse_from(["sawtooth", "residual-vs-g"]).unwrap();
        let (kind, a) = cli.command.split();
        assert_eq!(a.into_config(kind).n_q, (8..=14).collect::<Vec<_>>());
    }

    #[test]
    fn parse_errors_exit_one() {
        assert_eq!(run_cli(["sawtooth", "bogus"]), 1);
        assert_eq!(run_cli(["sawtooth", "single", "--nq", "abc"]), 1);
        assert_eq!(run_cli(["sawtooth", "--help"]), 0);
    }
}
