//! The experiment runners behind each CLI subcommand.
//!
//! Every runner validates its configuration, fans independent simulations
//! out to a worker pool, merges results in job order, writes its tables and
//! finally a `manifest.json` listing every file it produced.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use sawtooth_core::analysis::{
    default_plateau_start, fit_exp_plateau, fit_noise_rate, realization_mean, residual_concurrence, scaling_fit,
    DecayFit, NoiseDecayFit, ScalingFit,
};
use sawtooth_core::classical::{conductance, d_ql, estimate_d0_with, gamma_c, DiffusionConfig, DiffusionEstimate};
use sawtooth_core::{evolve, MapParams, NoiseModel, StateVector, TimeSeries};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{HarnessError, HarnessResult};
use crate::manifest::{RunManifest, RunRecord};
use crate::output::{Cell, OutputDir, Table};

/// One quantum simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub n_q: usize,
    pub chaos: f64,
    pub cells: u32,
    pub epsilon: f64,
    pub realization: Option<u64>,
}

impl Job {
    pub fn ideal(n_q: usize, chaos: f64, cells: u32) -> Self {
        Self {
            n_q,
            chaos,
            cells,
            epsilon: 0.0,
            realization: None,
        }
    }

    fn label(&self) -> String {
        let base = format!("nq{}_K{}_L{}_eps{}", self.n_q, self.chaos, self.cells, self.epsilon);
        match self.realization {
            Some(r) => format!("{base}_r{r}"),
            None => base,
        }
    }
}

/// Runs `job` from the standard initial state for `cfg.t_max` steps.
pub fn simulate(job: &Job, cfg: &ExperimentConfig) -> HarnessResult<(TimeSeries<f64>, RunRecord)> {
    let start = Instant::now();
    let params = MapParams::new(job.n_q, job.chaos, job.cells)?;
    let noise = match job.realization {
        Some(r) => NoiseModel::new(job.epsilon, cfg.seed, r)?.with_noisy_swaps(cfg.noisy_swaps),
        None => NoiseModel::ideal(),
    };
    let mut psi = StateVector::initial_state(job.n_q)?;
    let series = evolve(&mut psi, &params, cfg.t_max, &noise, |_, _| {})?;
    let record = RunRecord {
        label: job.label(),
        n_q: job.n_q,
        chaos: job.chaos,
        cells: job.cells,
        epsilon: job.epsilon,
        seed: cfg.seed,
        realization_id: job.realization,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((series, record))
}

/// `D0(K)` with the ensemble settings of `cfg`.
pub fn classical_d0(chaos: f64, cfg: &ExperimentConfig) -> HarnessResult<DiffusionEstimate<f64>> {
    let dc = DiffusionConfig {
        trajectories: cfg.trajectories,
        window: (sawtooth_core::classical::D0_FIT_WINDOW.0, cfg.d0_t_max),
        ..DiffusionConfig::new(cfg.seed)
    };
    Ok(estimate_d0_with(chaos, &dc)?)
}

struct Context {
    cfg: ExperimentConfig,
    out: OutputDir,
    manifest: RunManifest,
    pool: rayon::ThreadPool,
    start: Instant,
}

impl Context {
    fn new(cfg: &ExperimentConfig, kind: ExperimentKind) -> HarnessResult<Self> {
        if cfg.kind != kind {
            return Err(HarnessError::Validation(format!(
                "configuration is for {:?}, not {kind:?}",
                cfg.kind
            )));
        }
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| HarnessError::Runtime(e.to_string()))?;
        Ok(Self {
            out: OutputDir::create(&cfg.output)?,
            manifest: RunManifest::new(cfg),
            cfg: cfg.clone(),
            pool,
            start: Instant::now(),
        })
    }

    /// Order-preserving parallel map over independent jobs.
    fn par_map<I, O, F>(&self, jobs: Vec<I>, f: F) -> Vec<O>
    where
        I: Send,
        O: Send,
        F: Fn(I) -> O + Sync + Send,
    {
        self.pool.install(|| jobs.into_par_iter().map(f).collect())
    }

    fn d0_table(&self, chaos: &[f64]) -> BTreeMap<u64, HarnessResult<DiffusionEstimate<f64>>> {
        let mut keys: Vec<f64> = chaos.to_vec();
        keys.sort_by(f64::total_cmp);
        keys.dedup();
        let cfg = &self.cfg;
        let est = self.par_map(keys.clone(), |k| classical_d0(k, cfg));
        keys.into_iter().map(f64::to_bits).zip(est).collect()
    }

    fn plateau_start(&self, d0: f64, cells: u32) -> u64 {
        self.cfg
            .plateau_start
            .unwrap_or_else(|| default_plateau_start(gamma_c(d0, cells)))
    }

    fn finish(mut self) -> HarnessResult<RunManifest> {
        self.manifest.wall_seconds = self.start.elapsed().as_secs_f64();
        let written = std::mem::take(&mut self.out.written);
        self.manifest.inventory(&self.out.root, &written)?;
        let path = self.out.root.join("manifest.json");
        std::fs::write(path, serde_json::to_vec_pretty(&self.manifest)?)?;
        Ok(self.manifest)
    }
}

fn status<T>(r: &HarnessResult<T>) -> Cell {
    match r {
        Ok(_) => Cell::from("ok"),
        Err(e) => Cell::from(format!("error: {e}")),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleRunReport {
    pub series: TimeSeries<f64>,
    pub fit: Option<DecayFit<f64>>,
    pub manifest: RunManifest,
}

pub fn run_single(cfg: &ExperimentConfig) -> HarnessResult<SingleRunReport> {
    let mut ctx = Context::new(cfg, ExperimentKind::SingleRun)?;
    let job = Job {
        realization: (cfg.epsilon[0] > 0.0).then_some(0),
        epsilon: cfg.epsilon[0],
        ..Job::ideal(cfg.n_q[0], cfg.chaos[0], cfg.cells[0])
    };
    let (series, rec) = simulate(&job, cfg)?;
    ctx.manifest.runs.push(rec);
    let stem = job.label();
    ctx.out.series(&format!("series_{stem}"), &series, cfg.format)?;
    ctx.out.curve(
        &format!("curve_{stem}"),
        &["t", "C"],
        series.records.iter().map(|r| (r.t, vec![r.c])),
    )?;

    let fit = match fit_exp_plateau(&series) {
        Ok(f) => {
            if !f.converged {
                ctx.manifest.notice(format!("decay fit for {stem} did not converge"));
            }
            Some(f)
        }
        Err(e) => {
            ctx.manifest.notice(format!("decay fit skipped: {e}"));
            None
        }
    };
    let mut t = Table::new(&[
        "n_q", "K", "L", "eps", "t_max", "A", "gamma", "C_bar", "residual_rms", "iterations", "converged",
    ]);
    t.push(vec![
        job.n_q.into(),
        job.chaos.into(),
        job.cells.into(),
        job.epsilon.into(),
        cfg.t_max.into(),
        fit.map(|f| f.amplitude).into(),
        fit.map(|f| f.gamma).into(),
        fit.map(|f| f.c_bar).into(),
        fit.map(|f| f.residual_rms).into(),
        fit.map(|f| f.iterations).into(),
        fit.map(|f| f.converged.to_string()).unwrap_or_else(|| "skipped".into()).into(),
    ]);
    ctx.out.table("summary", &t)?;
    let manifest = ctx.finish()?;
    Ok(SingleRunReport { series, fit, manifest })
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaPoint {
    pub chaos: f64,
    pub fit: Option<DecayFit<f64>>,
    pub d0: Option<DiffusionEstimate<f64>>,
    pub gamma_c: Option<f64>,
    /// `2γL²`.
    pub gamma_tilde: Option<f64>,
    /// `γ̃ / D_ql`.
    pub ratio_ql: Option<f64>,
    pub error: Option<String>,
}

impl GammaPoint {
    /// `γ̃ / D0`, equivalently `γ / γ_c`.
    pub fn ratio_d0(&self) -> Option<f64> {
        Some(self.gamma_tilde? / self.d0?.d0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub n_q: usize,
    pub cells: u32,
    pub points: Vec<GammaPoint>,
    pub manifest: RunManifest,
}

pub fn run_gamma_vs_k(cfg: &ExperimentConfig) -> HarnessResult<GammaReport> {
    let mut ctx = Context::new(cfg, ExperimentKind::GammaVsK)?;
    let (n_q, cells) = (cfg.n_q[0], cfg.cells[0]);
    let d0s = ctx.d0_table(&cfg.chaos);
    let jobs: Vec<Job> = cfg.chaos.iter().map(|&k| Job::ideal(n_q, k, cells)).collect();
    let sims = ctx.par_map(jobs.clone(), |j| simulate(&j, cfg));

    let mut table = Table::new(&[
        "K", "n_q", "L", "gamma", "A", "C_bar", "converged", "D0", "D0_stderr", "gamma_c", "gamma_tilde", "D_ql",
        "R", "gamma_tilde_over_D0", "status",
    ]);
    let mut points = Vec::new();
    for (job, sim) in jobs.iter().zip(sims) {
        let d0 = match &d0s[&job.chaos.to_bits()] {
            Ok(e) => Ok(*e),
            Err(e) => Err(HarnessError::Runtime(e.to_string())),
        };
        let result = sim.and_then(|(series, rec)| {
            ctx.manifest.runs.push(rec);
            ctx.out.series(&format!("series_{}", job.label()), &series, cfg.format)?;
            Ok(fit_exp_plateau(&series)?)
        });
        let fit = result.as_ref().ok().copied();
        let est = d0.as_ref().ok().copied();
        let gamma_tilde = fit.map(|f| 2.0 * f.gamma * f64::from(cells).powi(2));
        let point = GammaPoint {
            chaos: job.chaos,
            fit,
            d0: est,
            gamma_c: est.map(|e| gamma_c(e.d0, cells)),
            gamma_tilde,
            ratio_ql: gamma_tilde.map(|g| g / d_ql(job.chaos)),
            error: result.as_ref().err().or(d0.as_ref().err()).map(|e| e.to_string()),
        };
        if let Some(e) = &point.error {
            ctx.manifest.notice(format!("K = {}: {e}", job.chaos));
        } else if fit.is_some_and(|f| !f.converged) {
            ctx.manifest.notice(format!("K = {}: decay fit did not converge", job.chaos));
        }
        table.push(vec![
            job.chaos.into(),
            n_q.into(),
            cells.into(),
            fit.map(|f| f.gamma).into(),
            fit.map(|f| f.amplitude).into(),
            fit.map(|f| f.c_bar).into(),
            fit.map(|f| f.converged.to_string()).unwrap_or_default().into(),
            est.map(|e| e.d0).into(),
            est.map(|e| e.stderr).into(),
            point.gamma_c.into(),
            gamma_tilde.into(),
            d_ql(job.chaos).into(),
            point.ratio_ql.into(),
            point.ratio_d0().into(),
            if point.error.is_some() { status(&result.and(d0)) } else { "ok".into() },
        ]);
        points.push(point);
    }
    ctx.out.table("gamma_vs_K", &table)?;
    let all_failed = points.iter().all(|p| p.error.is_some());
    let manifest = ctx.finish()?;
    if all_failed {
        return Err(HarnessError::Runtime("every K point failed".into()));
    }
    Ok(GammaReport {
        n_q,
        cells,
        points,
        manifest,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualPoint {
    pub n_q: usize,
    pub cells: u32,
    pub chaos: f64,
    pub d0: Option<f64>,
    pub conductance: Option<f64>,
    pub plateau_start: Option<u64>,
    pub c_bar: Option<f64>,
    pub c_bar_fit: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub points: Vec<ResidualPoint>,
    pub scaling: Option<ScalingFit<f64>>,
    pub manifest: RunManifest,
}

pub fn run_residual_vs_g(cfg: &ExperimentConfig) -> HarnessResult<ResidualReport> {
    let mut ctx = Context::new(cfg, ExperimentKind::ResidualVsG)?;
    let d0s = ctx.d0_table(&cfg.chaos);
    let mut jobs = Vec::new();
    for &k in &cfg.chaos {
        for &l in &cfg.cells {
            for &n in &cfg.n_q {
                jobs.push(Job::ideal(n, k, l));
            }
        }
    }
    let sims = ctx.par_map(jobs.clone(), |j| simulate(&j, cfg));

    let mut table = Table::new(&["n_q", "L", "K", "N", "D0", "g", "plateau_start", "C_bar", "C_bar_fit", "status"]);
    let mut points = Vec::new();
    for (job, sim) in jobs.iter().zip(sims) {
        let d0 = d0s[&job.chaos.to_bits()].as_ref().ok().map(|e| e.d0);
        let params = MapParams::new(job.n_q, job.chaos, job.cells)?;
        let g = d0.map(|d| conductance(&params, d));
        let ps = d0.map(|d| ctx.plateau_start(d, job.cells));
        let result: HarnessResult<(f64, Option<f64>)> = sim.and_then(|(series, rec)| {
            ctx.manifest.runs.push(rec);
            ctx.out.series(&format!("series_{}", job.label()), &series, cfg.format)?;
            let ps = ps.ok_or_else(|| HarnessError::Runtime(format!("no D0 for K = {}", job.chaos)))?;
            let c_bar = residual_concurrence(&series, ps)?;
            let c_fit = fit_exp_plateau(&series).ok().filter(|f| f.converged).map(|f| f.c_bar);
            Ok((c_bar, c_fit))
        });
        let point = ResidualPoint {
            n_q: job.n_q,
            cells: job.cells,
            chaos: job.chaos,
            d0,
            conductance: g,
            plateau_start: ps,
            c_bar: result.as_ref().ok().map(|r| r.0),
            c_bar_fit: result.as_ref().ok().and_then(|r| r.1),
            error: result.as_ref().err().map(|e| e.to_string()),
        };
        if let Some(e) = &point.error {
            ctx.manifest.notice(format!("{}: {e}", job.label()));
        }
        table.push(vec![
            job.n_q.into(),
            job.cells.into(),
            job.chaos.into(),
            params.dim().into(),
            d0.into(),
            g.into(),
            ps.into(),
            point.c_bar.into(),
            point.c_bar_fit.into(),
            status(&result),
        ]);
        points.push(point);
    }
    ctx.out.table("residual_vs_g", &table)?;

    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| Some((p.conductance?, p.c_bar?)))
        .filter(|&(g, c)| g > 0.0 && c > 0.0)
        .collect();
    ctx.out.curve(
        "loglog",
        &["index", "ln_g", "ln_C_bar"],
        xy.iter().enumerate().map(|(i, &(g, c))| (i as u64, vec![g.ln(), c.ln()])),
    )?;
    let scaling = if xy.len() < 3 {
        ctx.manifest
            .notice(format!("{} usable grid point(s); scaling fit skipped", xy.len()));
        None
    } else {
        match scaling_fit(&xy) {
            Ok(f) => Some(f),
            Err(e) => {
                ctx.manifest.notice(format!("scaling fit skipped: {e}"));
                None
            }
        }
    };
    if let Some(f) = scaling {
        let mut t = Table::new(&["exponent", "prefactor", "stderr", "points"]);
        t.push(vec![f.exponent.into(), f.prefactor.into(), f.stderr.into(), xy.len().into()]);
        ctx.out.table("scaling", &t)?;
    }
    let all_failed = points.iter().all(|p| p.error.is_some());
    let manifest = ctx.finish()?;
    if all_failed {
        return Err(HarnessError::Runtime("every grid point failed".into()));
    }
    Ok(ResidualReport {
        points,
        scaling,
        manifest,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoisePoint {
    pub n_q: usize,
    pub epsilon: f64,
    /// `ε²√N`.
    pub x: f64,
    pub plateau_start: Option<u64>,
    pub fit: Option<NoiseDecayFit<f64>>,
    pub error: Option<String>,
}

impl NoisePoint {
    /// `Γ / (ε²√N)`.
    pub fn prefactor(&self) -> Option<f64> {
        let f = self.fit?;
        (self.x > 0.0).then(|| f.gamma / self.x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseReport {
    pub points: Vec<NoisePoint>,
    pub scaling: Option<ScalingFit<f64>>,
    pub manifest: RunManifest,
}

impl NoiseReport {
    /// Mean of `Γ/(ε²√N)` over points with `ε > 0` and a fit.
    pub fn pooled_prefactor(&self) -> Option<f64> {
        let v: Vec<f64> = self.points.iter().filter_map(NoisePoint::prefactor).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Ideal run plus `cfg.realizations` noisy runs for each `ε` at one `n_q`,
/// all dispatched together; one fit per `ε`.
fn noise_group(ctx: &mut Context, n_q: usize, plateau_start: Option<u64>) -> HarnessResult<Vec<NoisePoint>> {
    let cfg = ctx.cfg.clone();
    let (chaos, cells) = (cfg.chaos[0], cfg.cells[0]);
    let mut jobs = vec![Job::ideal(n_q, chaos, cells)];
    for &eps in &cfg.epsilon {
        for r in 0..cfg.realizations as u64 {
            jobs.push(Job {
                epsilon: eps,
                realization: Some(r),
                ..Job::ideal(n_q, chaos, cells)
            });
        }
    }
    let mut sims = ctx.par_map(jobs.clone(), |j| simulate(&j, &cfg)).into_iter();
    let (ideal, rec) = sims.next().expect("ideal job present")?;
    ctx.manifest.runs.push(rec);
    ctx.out.series(&format!("series_{}", jobs[0].label()), &ideal, cfg.format)?;

    let n = (1u64 << n_q) as f64;
    let mut points = Vec::new();
    for &eps in &cfg.epsilon {
        let mut noisy = Vec::with_capacity(cfg.realizations);
        let mut failure = None;
        for _ in 0..cfg.realizations {
            match sims.next().expect("one result per job") {
                Ok((s, rec)) => {
                    ctx.manifest.runs.push(rec);
                    noisy.push(s);
                }
                Err(e) => failure = Some(e),
            }
        }
        let stem = format!("nq{n_q}_K{chaos}_L{cells}_eps{eps}");
        let result: HarnessResult<NoiseDecayFit<f64>> = match (failure, plateau_start) {
            (Some(e), _) => Err(e),
            (None, None) => Err(HarnessError::Runtime("no plateau onset (D0 unavailable)".into())),
            (None, Some(ps)) => {
                let mean = realization_mean(&noisy)?;
                ctx.out.curve(
                    &format!("noise_{stem}"),
                    &["t", "C_ideal", "C_noisy_mean"],
                    ideal.records.iter().zip(&mean).map(|(r, &m)| (r.t, vec![r.c, m])),
                )?;
                fit_noise_rate(&noisy, &ideal, ps, cfg.ratio_window, cfg.ratio_floor).map_err(Into::into)
            }
        };
        let point = NoisePoint {
            n_q,
            epsilon: eps,
            x: eps * eps * n.sqrt(),
            plateau_start,
            fit: result.as_ref().ok().copied(),
            error: result.as_ref().err().map(|e| e.to_string()),
        };
        if let Some(e) = &point.error {
            ctx.manifest.notice(format!("{stem}: {e}"));
        }
        points.push(point);
    }
    Ok(points)
}

fn noise_table(points: &[NoisePoint]) -> Table {
    let mut t = Table::new(&[
        "n_q", "N", "eps", "eps2_sqrtN", "Gamma", "Gamma_over_eps2_sqrtN", "stderr", "plateau_start", "fit_lo",
        "fit_hi", "points_used", "points_excluded", "points_truncated", "realizations", "status",
    ]);
    for p in points {
        let f = p.fit;
        t.push(vec![
            p.n_q.into(),
            (1usize << p.n_q).into(),
            p.epsilon.into(),
            p.x.into(),
            f.map(|f| f.gamma).into(),
            p.prefactor().into(),
            f.map(|f| f.stderr).into(),
            p.plateau_start.into(),
            f.map(|f| f.window.0).into(),
            f.map(|f| f.window.1).into(),
            f.map(|f| f.points_used).into(),
            f.map(|f| f.points_excluded).into(),
            f.map(|f| f.points_truncated).into(),
            f.map(|f| f.n_realizations).into(),
            match &p.error {
                None => "ok".into(),
                Some(e) => format!("error: {e}").into(),
            },
        ]);
    }
    t
}

fn noise_common(cfg: &ExperimentConfig, kind: ExperimentKind) -> HarnessResult<NoiseReport> {
    let mut ctx = Context::new(cfg, kind)?;
    if cfg.realizations == 1 {
        ctx.manifest
            .notice("realizations = 1: the noisy average has high variance");
    }
    let (chaos, cells) = (cfg.chaos[0], cfg.cells[0]);
    let plateau_start = match (cfg.plateau_start, classical_d0(chaos, cfg)) {
        (Some(ps), _) => Some(ps),
        (None, Ok(e)) => Some(ctx.plateau_start(e.d0, cells)),
        (None, Err(e)) => {
            ctx.manifest.notice(format!("D0 for K = {chaos} failed: {e}"));
            None
        }
    };
    let mut points = Vec::new();
    for &n_q in &cfg.n_q {
        points.extend(noise_group(&mut ctx, n_q, plateau_start)?);
    }
    ctx.out.table("noise_rates", &noise_table(&points))?;

    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| Some((p.x, p.fit?.gamma)))
        .filter(|&(x, g)| x > 0.0 && g > 0.0)
        .collect();
    let scaling = if kind == ExperimentKind::NoiseScaling && xy.len() >= 3 {
        match scaling_fit(&xy) {
            Ok(f) => Some(f),
            Err(e) => {
                ctx.manifest.notice(format!("scaling fit skipped: {e}"));
                None
            }
        }
    } else {
        if kind == ExperimentKind::NoiseScaling {
            ctx.manifest
                .notice(format!("{} usable point(s); scaling fit skipped", xy.len()));
        }
        None
    };
    let report_stub = NoiseReport {
        points,
        scaling,
        manifest: RunManifest::new(cfg),
    };
    if kind == ExperimentKind::NoiseScaling {
        let mut t = Table::new(&["exponent", "prefactor", "stderr", "pooled_Gamma_over_eps2_sqrtN", "points"]);
        t.push(vec![
            scaling.map(|f| f.exponent).into(),
            scaling.map(|f| f.prefactor).into(),
            scaling.map(|f| f.stderr).into(),
            report_stub.pooled_prefactor().into(),
            xy.len().into(),
        ]);
        ctx.out.table("noise_scaling", &t)?;
    }
    let all_failed = report_stub.points.iter().all(|p| p.error.is_some());
    let manifest = ctx.finish()?;
    if all_failed {
        return Err(HarnessError::Runtime("every noise point failed".into()));
    }
    Ok(NoiseReport { manifest, ..report_stub })
}

pub fn run_noise_single(cfg: &ExperimentConfig) -> HarnessResult<NoiseReport> {
    noise_common(cfg, ExperimentKind::NoiseSingle)
}

pub fn run_noise_scaling(cfg: &ExperimentConfig) -> HarnessResult<NoiseReport> {
    noise_common(cfg, ExperimentKind::NoiseScaling)
}

#[derive(Debug, Clone, Serialize)]
pub struct D0Report {
    pub points: Vec<(f64, Option<DiffusionEstimate<f64>>)>,
    pub manifest: RunManifest,
}

pub fn run_classical_d0(cfg: &ExperimentConfig) -> HarnessResult<D0Report> {
    let mut ctx = Context::new(cfg, ExperimentKind::ClassicalD0)?;
    let est = ctx.par_map(cfg.chaos.clone(), |k| classical_d0(k, cfg));
    let mut table = Table::new(&[
        "K", "D0", "stderr", "r_squared", "fit_lo", "fit_hi", "D_ql", "D0_over_D_ql", "cantori", "D0_over_cantori",
        "status",
    ]);
    let mut points = Vec::new();
    for (&k, r) in cfg.chaos.iter().zip(est) {
        let e = r.as_ref().ok().copied();
        if let Err(err) = &r {
            ctx.manifest.notice(format!("K = {k}: {err}"));
        }
        let cantori = sawtooth_core::classical::cantori_d0(k);
        table.push(vec![
            k.into(),
            e.map(|e| e.d0).into(),
            e.map(|e| e.stderr).into(),
            e.map(|e| e.r_squared).into(),
            e.map(|e| e.window.0).into(),
            e.map(|e| e.window.1).into(),
            d_ql(k).into(),
            e.map(|e| e.d0 / d_ql(k)).into(),
            cantori.into(),
            e.map(|e| e.d0 / cantori).into(),
            status(&r),
        ]);
        points.push((k, e));
    }
    ctx.out.table("classical_d0", &table)?;
    let all_failed = points.iter().all(|p| p.1.is_none());
    let manifest = ctx.finish()?;
    if all_failed {
        return Err(HarnessError::Runtime("every D0 estimate failed".into()));
    }
    Ok(D0Report { points, manifest })
}

/// Dispatches on `cfg.kind`; returns the manifest.
pub fn run(cfg: &ExperimentConfig) -> HarnessResult<RunManifest> {
    Ok(match cfg.kind {
        ExperimentKind::SingleRun => run_single(cfg)?.manifest,
        ExperimentKind::GammaVsK => run_gamma_vs_k(cfg)?.manifest,
        ExperimentKind::ResidualVsG => run_residual_vs_g(cfg)?.manifest,
        ExperimentKind::NoiseSingle => run_noise_single(cfg)?.manifest,
        ExperimentKind::NoiseScaling => run_noise_scaling(cfg)?.manifest,
        ExperimentKind::ClassicalD0 => run_classical_d0(cfg)?.manifest,
    })
}
