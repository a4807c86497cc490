use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, HarnessResult};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 20;
/// Default ceiling on `t_max · 2^n_q` for a single run.
pub const DEFAULT_OP_BUDGET: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SingleRun,
    GammaVsK,
    ResidualVsG,
    NoiseSingle,
    NoiseScaling,
    ClassicalD0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything that determines the numbers an experiment produces, plus
/// where to put them and how many threads to use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_q: Vec<usize>,
    pub chaos: Vec<f64>,
    pub cells: Vec<u32>,
    pub epsilon: Vec<f64>,
    pub t_max: u64,
    pub realizations: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
    /// Overrides the default `ceil(7/γ_c)` plateau onset.
    pub plateau_start: Option<u64>,
    /// Classical ensemble size for `D0`.
    pub trajectories: usize,
    /// Last step of the classical variance fit.
    pub d0_t_max: u64,
    /// Moving window applied to the noisy/ideal ratio.
    pub ratio_window: usize,
    /// Smoothed ratio below which the noise fit stops.
    pub ratio_floor: f64,
    pub noisy_swaps: bool,
    pub op_budget: f64,
}

impl ExperimentConfig {
    /// Defaults shaped after the figure each experiment reproduces.
    pub fn new(kind: ExperimentKind) -> Self {
        let (n_q, chaos, epsilon) = match kind {
            ExperimentKind::SingleRun => (vec![12], vec![0.5], vec![0.0]),
            ExperimentKind::GammaVsK => (vec![12], vec![0.3, 0.5, 1.0, 2.0], vec![0.0]),
            ExperimentKind::ResidualVsG => ((8..=14).collect(), vec![0.5], vec![0.0]),
            ExperimentKind::NoiseSingle => (vec![12], vec![0.5], vec![0.003]),
            ExperimentKind::NoiseScaling => (vec![8, 10, 12], vec![0.5], vec![0.004, 0.007, 0.01]),
            ExperimentKind::ClassicalD0 => (vec![12], vec![0.1, 0.3, 0.5, 1.0, 2.0], vec![0.0]),
        };
        Self {
            kind,
            n_q,
            chaos,
            cells: vec![4],
            epsilon,
            t_max: 10_000,
            realizations: 20,
            seed: 1,
            output: PathBuf::from("out"),
            format: OutputFormat::Csv,
            workers: 1,
            plateau_start: None,
            trajectories: sawtooth_core::classical::D0_DEFAULT_TRAJECTORIES,
            d0_t_max: sawtooth_core::classical::D0_FIT_WINDOW.1,
            ratio_window: sawtooth_core::analysis::NOISE_RATIO_WINDOW,
            ratio_floor: sawtooth_core::analysis::NOISE_RATIO_FLOOR,
            noisy_swaps: false,
            op_budget: DEFAULT_OP_BUDGET,
        }
    }

    /// Checks every parameter combination before anything runs.
    pub fn validate(&self) -> HarnessResult<()> {
        let bad = |msg: String| Err(HarnessError::Validation(msg));
        let single = |name: &str, len: usize| -> HarnessResult<()> {
            if len != 1 {
                return Err(HarnessError::Validation(format!(
                    "{:?} takes exactly one {name} value, got {len}",
                    self.kind
                )));
            }
            Ok(())
        };
        for (name, len) in [("n_q", self.n_q.len()), ("K", self.chaos.len()), ("L", self.cells.len()), ("eps", self.epsilon.len())] {
            if len == 0 {
                return bad(format!("empty {name} list"));
            }
        }
        if let Some(&n) = self.n_q.iter().find(|n| !(MIN_QUBITS..=MAX_QUBITS).contains(n)) {
            return bad(format!("n_q = {n} outside [{MIN_QUBITS}, {MAX_QUBITS}]"));
        }
        if let Some(&l) = self.cells.iter().find(|&&l| l == 0 || l % 4 != 0) {
            return bad(format!("L = {l} is not a positive multiple of 4"));
        }
        if let Some(&e) = self.epsilon.iter().find(|e| !e.is_finite() || **e < 0.0) {
            return bad(format!("eps = {e} must be finite and non-negative"));
        }
        let needs_d0 = !matches!(self.kind, ExperimentKind::SingleRun) || self.plateau_start.is_none();
        if let Some(&k) = self.chaos.iter().find(|k| !k.is_finite() || **k < 0.0 || (needs_d0 && **k == 0.0)) {
            return bad(format!("K = {k} must be finite and positive"));
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.trajectories < sawtooth_core::classical::MIN_TRAJECTORIES {
            return bad(format!(
                "trajectories = {} below {}",
                self.trajectories,
                sawtooth_core::classical::MIN_TRAJECTORIES
            ));
        }
        if self.d0_t_max < sawtooth_core::classical::D0_FIT_WINDOW.0 + 2 {
            return bad(format!("d0 t_max = {} leaves no fit window", self.d0_t_max));
        }
        if self.ratio_window == 0 {
            return bad("ratio window must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.ratio_floor) {
            return bad(format!("ratio floor {} outside [0, 1)", self.ratio_floor));
        }
        for &n in &self.n_q {
            let ops = self.t_max as f64 * (1u64 << n) as f64;
            if ops > self.op_budget {
                return bad(format!(
                    "t_max · 2^n_q = {ops:.3e} for n_q = {n} exceeds the op budget {:.3e}",
                    self.op_budget
                ));
            }
        }
        match self.kind {
            ExperimentKind::SingleRun => {
                single("n_q", self.n_q.len())?;
                single("K", self.chaos.len())?;
                single("L", self.cells.len())?;
                single("eps", self.epsilon.len())?;
            }
            ExperimentKind::NoiseSingle => {
                single("n_q", self.n_q.len())?;
                single("K", self.chaos.len())?;
                single("L", self.cells.len())?;
                single("eps", self.epsilon.len())?;
                self.noise_window_fits()?;
            }
            ExperimentKind::GammaVsK => {
                single("n_q", self.n_q.len())?;
                single("L", self.cells.len())?;
            }
            ExperimentKind::ResidualVsG | ExperimentKind::ClassicalD0 => {}
            ExperimentKind::NoiseScaling => {
                single("K", self.chaos.len())?;
                single("L", self.cells.len())?;
                self.noise_window_fits()?;
            }
        }
        Ok(())
    }

    fn noise_window_fits(&self) -> HarnessResult<()> {
        if self.ratio_window as u64 > self.t_max {
            return Err(HarnessError::Validation(format!(
                "ratio window {} longer than t_max = {}",
                self.ratio_window, self.t_max
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of every field that affects numerical
    /// output. `output` and `workers` are excluded.
    pub fn hash(&self) -> String {
        let mut key = self.clone();
        key.output = PathBuf::new();
        key.workers = 0;
        let json = serde_json::to_vec(&key).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::value_variants() {
            ExperimentConfig::new(*kind).validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = ExperimentConfig::new(ExperimentKind::SingleRun);
        let cases: Vec<Box<dyn Fn(&mut ExperimentConfig)>> = vec![
            Box::new(|c| c.n_q = vec![21]),
            Box::new(|c| c.n_q = vec![1]),
            Box::new(|c| c.cells = vec![6]),
            Box::new(|c| c.epsilon = vec![-0.1]),
            Box::new(|c| c.chaos = vec![]),
            Box::new(|c| c.chaos = vec![0.5, 1.0]),
            Box::new(|c| c.workers = 0),
            Box::new(|c| c.realizations = 0),
            Box::new(|c| {
                c.n_q = vec![20];
                c.t_max = 10_000_000;
            }),
        ];
        for (i, f) in cases.iter().enumerate() {
            let mut c = base.clone();
            f(&mut c);
            assert!(matches!(c.validate(), Err(HarnessError::Validation(_))), "case {i}");
        }
        let mut g = ExperimentConfig::new(ExperimentKind::GammaVsK);
        g.chaos.clear();
        assert!(g.validate().is_err());
    }

    #[test]
    fn hash_ignores_plumbing_only() {
        let a = ExperimentConfig::new(ExperimentKind::NoiseScaling);
        let mut b = a.clone();
        b.workers = 8;
        b.output = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
