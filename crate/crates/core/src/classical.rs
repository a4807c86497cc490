//! Classical sawtooth map `n̄ = n + kθ`, `θ̄ = θ + T n̄ (mod 2π)` and the
//! diffusion quantities derived from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::linear_fit;
use crate::error::{domain, Error, Result};
use crate::map::MapParams;
use crate::scalar::Real;

/// First and last step of the default variance fit.
pub const D0_FIT_WINDOW: (u64, u64) = (10, 1000);
pub const D0_DEFAULT_TRAJECTORIES: usize = 100_000;
pub const MIN_TRAJECTORIES: usize = 1000;

/// Wraps `x` into `[−π, π)`.
pub fn wrap<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let y = (x + T::PI()).rem_euclid(&tau) - T::PI();
    // rem_euclid can round up to exactly τ for tiny negative inputs.
    if y >= T::PI() {
        y - tau
    } else {
        y
    }
}

trait RemEuclid {
    fn rem_euclid(self, m: &Self) -> Self;
}

impl<T: Real> RemEuclid for T {
    fn rem_euclid(self, m: &T) -> T {
        let r = self % *m;
        if r < T::zero() {
            r + *m
        } else {
            r
        }
    }
}

/// One forward step.
pub fn classical_step<T: Real>(n: T, theta: T, k: T, period: T) -> (T, T) {
    let n1 = n + k * theta;
    (n1, wrap(theta + period * n1))
}

/// Exact inverse of [`classical_step`].
pub fn classical_step_back<T: Real>(n1: T, theta1: T, k: T, period: T) -> (T, T) {
    let theta = wrap(theta1 - period * n1);
    (n1 - k * theta, theta)
}

/// `M` independent trajectories on the unbounded cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalEnsemble<T> {
    pub n: Vec<T>,
    pub theta: Vec<T>,
    pub k: T,
    pub period: T,
}

impl<T: Real> ClassicalEnsemble<T> {
    /// `n = 0`, `θ` uniform on `[−π, π)`.
    pub fn from_line<R: Rng + ?Sized>(m: usize, k: T, period: T, rng: &mut R) -> Result<Self> {
        if m == 0 {
            return domain("ensemble needs at least one trajectory");
        }
        if !(period > T::zero()) || !k.is_finite() {
            return domain(format!("invalid map parameters k = {k}, T = {period}"));
        }
        let theta = (0..m)
            .map(|_| wrap(T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))))
            .collect();
        Ok(Self {
            n: vec![T::zero(); m],
            theta,
            k,
            period,
        })
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn step(&mut self) {
        for (n, th) in self.n.iter_mut().zip(self.theta.iter_mut()) {
            (*n, *th) = classical_step(*n, *th, self.k, self.period);
        }
    }

    pub fn step_back(&mut self) {
        for (n, th) in self.n.iter_mut().zip(self.theta.iter_mut()) {
            (*n, *th) = classical_step_back(*n, *th, self.k, self.period);
        }
    }

    /// Variance of `y = Tn`. Needs `M ≥ 1000`.
    pub fn variance_y(&self) -> Result<T> {
        if self.len() < MIN_TRAJECTORIES {
            return domain(format!(
                "ensemble statistics need M ≥ {MIN_TRAJECTORIES}, got {}",
                self.len()
            ));
        }
        let m = T::from_usize_lossy(self.len());
        let mean = self.n.iter().copied().sum::<T>() / m;
        let var = self.n.iter().map(|&n| (n - mean) * (n - mean)).sum::<T>() / m;
        Ok(var * self.period * self.period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionEstimate<T> {
    /// Slope of `Var(y_t)` against `t`, `y = Tn`.
    pub d0: T,
    /// Momentum diffusion rate `D0 / T²` for the rescaling period used.
    pub d: T,
    pub period: T,
    pub window: (u64, u64),
    pub stderr: T,
    pub r_squared: T,
}

/// Settings for [`estimate_d0_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig<T> {
    pub trajectories: usize,
    pub window: (u64, u64),
    pub seed: u64,
    /// Rescaling period; the result is independent of it.
    pub period: T,
}

impl<T: Real> DiffusionConfig<T> {
    pub fn new(seed: u64) -> Self {
        Self {
            trajectories: D0_DEFAULT_TRAJECTORIES,
            window: D0_FIT_WINDOW,
            seed,
            period: T::one(),
        }
    }
}

/// `D0(K)` from an ensemble of `trajectories` with the default window.
pub fn estimate_d0<T: Real>(chaos: T, trajectories: usize, t_max: u64, seed: u64) -> Result<DiffusionEstimate<T>> {
    let cfg = DiffusionConfig {
        trajectories,
        window: (D0_FIT_WINDOW.0, t_max),
        ..DiffusionConfig::new(seed)
    };
    estimate_d0_with(chaos, &cfg)
}

pub fn estimate_d0_with<T: Real>(chaos: T, cfg: &DiffusionConfig<T>) -> Result<DiffusionEstimate<T>> {
    if !(chaos > T::zero()) || !chaos.is_finite() {
        return domain(format!("D0 needs K > 0, got {chaos}"));
    }
    let (lo, hi) = cfg.window;
    if hi < lo + 2 {
        return domain(format!("fit window ({lo}, {hi}) needs at least three points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ens = ClassicalEnsemble::from_line(cfg.trajectories, chaos / cfg.period, cfg.period, &mut rng)?;
    let mut xs = Vec::with_capacity((hi - lo + 1) as usize);
    let mut ys = Vec::with_capacity(xs.capacity());
    for t in 1..=hi {
        ens.step();
        if t >= lo {
            xs.push(T::from_u64(t).unwrap_or_else(T::nan));
            ys.push(ens.variance_y()?);
        }
    }
    let f = linear_fit(&xs, &ys)?;
    if !(f.slope > T::zero()) {
        return Err(Error::Fit(format!("variance does not grow (slope {})", f.slope)));
    }
    Ok(DiffusionEstimate {
        d0: f.slope,
        d: f.slope / (cfg.period * cfg.period),
        period: cfg.period,
        window: (lo, hi),
        stderr: f.slope_stderr,
        r_squared: f.r_squared,
    })
}

/// `γ_c = D0 / (2L²)`.
pub fn gamma_c<T: Real>(d0: T, cells: u32) -> T {
    let l = T::lit(f64::from(cells));
    d0 / (T::two() * l * l)
}

/// `γ_c = 2π² D / N²` with `D` the momentum diffusion rate.
pub fn gamma_c_from_momentum_diffusion<T: Real>(d: T, dim: usize) -> T {
    let n = T::from_usize_lossy(dim);
    T::two() * T::PI() * T::PI() * d / (n * n)
}

/// `g = N D0 / L²`.
pub fn conductance<T: Real>(p: &MapParams<T>, d0: T) -> T {
    let l = T::lit(f64::from(p.cells));
    T::from_usize_lossy(p.dim()) * d0 / (l * l)
}

/// `g = 2γ_c / Δ` with level spacing `Δ = 1/N`.
pub fn conductance_from_rate<T: Real>(gamma_c: T, dim: usize) -> T {
    T::two() * gamma_c * T::from_usize_lossy(dim)
}

/// Quasi-linear rate `π²K²/3`.
pub fn d_ql<T: Real>(chaos: T) -> T {
    T::PI() * T::PI() * chaos * chaos / T::lit(3.0)
}

/// Small-`K` estimate `1.2 π² K^{5/2} / 3`.
pub fn cantori_d0<T: Real>(chaos: T) -> T {
    T::lit(1.2) * T::PI() * T::PI() * chaos.powf(T::lit(2.5)) / T::lit(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn step_examples() {
        assert_eq!(classical_step(0.0, 0.0, 0.7, 0.3), (0.0, 0.0));
        let (n, th) = classical_step(1.0, 0.0, 5.0, TAU);
        assert_eq!(n, 1.0);
        assert!(th.abs() < 1e-12);
        let (n, _) = classical_step(2.5, 1.0, 0.0, 0.1);
        assert_eq!(n, 2.5);
    }

    #[test]
    fn wrap_range() {
        for &x in &[-PI, PI, 3.0 * PI, -1e-300, 0.0, 100.0, -100.0, TAU] {
            let w = wrap(x);
            assert!((-PI..PI).contains(&w), "{x} -> {w}");
            let turns = (x - w) / TAU;
            assert!((turns - turns.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn reversibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let k = rng.gen_range(0.0..5.0);
            let t = rng.gen_range(0.01..2.0);
            let n = rng.gen_range(-50.0..50.0);
            let th = rng.gen_range(-PI..PI);
            let (n1, th1) = classical_step(n, th, k, t);
            let (n0, th0) = classical_step_back(n1, th1, k, t);
            let dth = wrap(th0 - th);
            assert!((n0 - n).abs() < 1e-10 && dth.abs() < 1e-10);
        }
    }

    #[test]
    fn ensemble_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut e = ClassicalEnsemble::<f64>::from_line(1000, 0.5, 1.0, &mut rng).unwrap();
        let start = e.clone();
        for _ in 0..20 {
            e.step();
        }
        for _ in 0..20 {
            e.step_back();
        }
        for i in 0..e.len() {
            assert!((e.n[i] - start.n[i]).abs() < 1e-8);
            assert!(wrap(e.theta[i] - start.theta[i]).abs() < 1e-8);
        }
        assert!(e.theta.iter().all(|t| (-PI..PI).contains(t)));
    }

    #[test]
    fn small_ensembles_refuse_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = ClassicalEnsemble::from_line(999, 0.5, 1.0, &mut rng).unwrap();
        assert!(e.variance_y().is_err());
        assert!(estimate_d0(0.0, 1000, 100, 1).is_err());
        assert!(estimate_d0(0.5, 1000, 11, 1).is_err());
    }

    #[test]
    fn quasi_linear_regime() {
        let est = estimate_d0(2.0f64, 20_000, 300, 3).unwrap();
        let r = est.d0 / d_ql(2.0);
        assert!((0.5..=1.5).contains(&r), "R = {r}");
        assert!(est.r_squared >= 0.95);
        assert_abs_diff_eq!(est.d, est.d0, epsilon = 0.0);
    }

    #[test]
    fn rescaling_invariance() {
        let base = DiffusionConfig { trajectories: 5000, window: (10, 200), ..DiffusionConfig::new(8) };
        let a = estimate_d0_with(1.0f64, &base).unwrap();
        let b = estimate_d0_with(1.0f64, &DiffusionConfig { period: 0.37, ..base }).unwrap();
        assert!((a.d0 - b.d0).abs() < 3.0 * (a.stderr + b.stderr) + 1e-6 * a.d0);
        assert_abs_diff_eq!(b.d * 0.37 * 0.37, b.d0, epsilon = 1e-12 * b.d0);
    }

    #[test]
    fn rate_identities() {
        let d0 = 0.70f64;
        assert_abs_diff_eq!(gamma_c(d0, 4), 0.021875, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_c(d0, 8), gamma_c(d0, 4) / 4.0, epsilon = 1e-15);
        for n_q in [6, 10, 12, 14] {
            for l in [4u32, 8, 16] {
                let p = MapParams::new(n_q, 0.5, l).unwrap();
                let t = p.period();
                let via_d = gamma_c_from_momentum_diffusion(d0 / (t * t), p.dim());
                assert!((via_d - gamma_c(d0, l)).abs() <= 1e-12 * gamma_c(d0, l));
                let g = conductance(&p, d0);
                assert!((conductance_from_rate(gamma_c(d0, l), p.dim()) - g).abs() <= 1e-12 * g);
            }
        }
        let p = MapParams::new(12, 0.5, 4).unwrap();
        assert_abs_diff_eq!(conductance(&p, d0), 179.2, epsilon = 1e-9);
        let p2 = MapParams::new(13, 0.5, 4).unwrap();
        assert_abs_diff_eq!(conductance(&p2, d0), 2.0 * conductance(&p, d0), epsilon = 1e-9);
        assert_abs_diff_eq!(cantori_d0(0.5), 0.6978, epsilon = 1e-4);
        assert_abs_diff_eq!(d_ql(1.0), PI * PI / 3.0, epsilon = 1e-15);
    }
}
