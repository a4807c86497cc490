//! Time series of recorded observables and the fits run on them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::map::{MapParams, NoiseModel};
use crate::scalar::Real;

/// Column names of a [`TimeSeries`], in CSV order.
pub const COLUMNS: [&str; 9] = ["t", "C", "W00", "W01", "W10", "W11", "Q14", "Q23", "norm"];

/// Observables after `t` map steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record<T> {
    pub t: u64,
    pub c: T,
    pub w: [T; 4],
    pub q14: T,
    pub q23: T,
    pub norm: T,
}

impl<T: Real> Record<T> {
    /// Value columns (everything but `t`) in [`COLUMNS`] order.
    pub fn values(&self) -> [T; 8] {
        [self.c, self.w[0], self.w[1], self.w[2], self.w[3], self.q14, self.q23, self.norm]
    }

    pub fn from_values(t: u64, v: [T; 8]) -> Self {
        Self {
            t,
            c: v[0],
            w: [v[1], v[2], v[3], v[4]],
            q14: v[5],
            q23: v[6],
            norm: v[7],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub records: Vec<Record<T>>,
    pub params: Option<MapParams<T>>,
    pub noise: Option<NoiseModel<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(params: Option<MapParams<T>>, noise: Option<NoiseModel<T>>) -> Self {
        Self {
            records: Vec::new(),
            params,
            noise,
        }
    }

    /// Bare series of concurrence values at `t = t0, t0 + 1, …`; the other
    /// columns are zero.
    pub fn from_concurrence(t0: u64, c: &[T]) -> Self {
        let records = c
            .iter()
            .enumerate()
            .map(|(i, &c)| Record::from_values(t0 + i as u64, [c, T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::one()]))
            .collect();
        Self {
            records,
            params: None,
            noise: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn concurrence(&self) -> Vec<T> {
        self.records.iter().map(|r| r.c).collect()
    }

    /// Values of a named column (see [`COLUMNS`]).
    pub fn column(&self, name: &str) -> Option<Vec<T>> {
        let idx = COLUMNS.iter().position(|&c| c == name)?;
        Some(if idx == 0 {
            self.records.iter().map(|r| T::from_u64(r.t).unwrap_or_else(T::nan)).collect()
        } else {
            self.records.iter().map(|r| r.values()[idx - 1]).collect()
        })
    }

    /// Checks that `t` strictly increases and `C ∈ [0, 1 + 10⁻⁹]`.
    pub fn validate(&self) -> Result<()> {
        if self.records.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Numerical("time column is not strictly increasing".into()));
        }
        let hi = T::one() + T::lit(1e-9);
        if let Some(r) = self.records.iter().find(|r| !(r.c >= T::zero() && r.c <= hi)) {
            return Err(Error::Numerical(format!("concurrence {} out of range at t = {}", r.c, r.t)));
        }
        Ok(())
    }
}

/// Result of fitting `C(t) = A e^{−γt} + C̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit<T> {
    pub amplitude: T,
    pub gamma: T,
    pub c_bar: T,
    pub residual_rms: T,
    pub window: (u64, u64),
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseDecayFit<T> {
    /// Decay rate of the noisy/ideal concurrence ratio, clamped at zero.
    pub gamma: T,
    /// Raw slope of `ln r(t)`; `gamma = max(0, −slope)`.
    pub slope: T,
    pub stderr: T,
    pub window: (u64, u64),
    pub n_realizations: usize,
    pub points_used: usize,
    pub points_excluded: usize,
    /// Smoothed points dropped because they follow the first crossing of
    /// the ratio floor.
    pub points_truncated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub slope_stderr: T,
    pub r_squared: T,
}

/// Power law `y = prefactor · x^exponent` fitted in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit<T> {
    pub exponent: T,
    pub prefactor: T,
    pub stderr: T,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Result<LinearFit<T>> {
    let n = x.len();
    if n != y.len() {
        return domain("x and y lengths differ");
    }
    if n < 2 {
        return domain("linear fit needs at least two points");
    }
    let nf = T::from_usize_lossy(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let sxx: T = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let syy: T = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let scale = x.iter().map(|v| v.abs()).fold(T::zero(), T::max).max(T::one());
    if !(sxx > T::epsilon() * scale * scale * nf) {
        return domain("degenerate abscissae: all x values coincide");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: T = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (ssr / T::from_usize_lossy(n - 2) / sxx).sqrt()
    } else {
        T::zero()
    };
    let r_squared = if syy > T::zero() { T::one() - ssr / syy } else { T::one() };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    })
}

/// Least-squares power law through positive points.
pub fn scaling_fit<T: Real>(points: &[(T, T)]) -> Result<ScalingFit<T>> {
    if points.len() < 3 {
        return domain(format!("scaling fit needs at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|&(x, y)| !(x > T::zero() && y > T::zero())) {
        return domain("scaling fit needs strictly positive coordinates");
    }
    let lx: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let f = linear_fit(&lx, &ly)?;
    Ok(ScalingFit {
        exponent: f.slope,
        prefactor: f.intercept.exp(),
        stderr: f.slope_stderr,
    })
}

/// Mean of each length-`window` run of `values`.
pub fn moving_mean<T: Real>(values: &[T], window: usize) -> Result<Vec<T>> {
    if window == 0 || window > values.len() {
        return domain(format!("moving window {window} outside [1, {}]", values.len()));
    }
    let w = T::from_usize_lossy(window);
    Ok(values.windows(window).map(|s| s.iter().copied().sum::<T>() / w).collect())
}

/// Centered moving mean of every column. Output record `i` averages input
/// records `i..i + window` and carries the time of record `i + (window − 1)/2`.
pub fn moving_average<T: Real>(series: &TimeSeries<T>, window: usize) -> Result<TimeSeries<T>> {
    let n = series.len();
    if window == 0 || window > n {
        return domain(format!("moving window {window} outside [1, {n}]"));
    }
    let w = T::from_usize_lossy(window);
    let records = series
        .records
        .windows(window)
        .map(|chunk| {
            let mut acc = [T::zero(); 8];
            for r in chunk {
                for (a, v) in acc.iter_mut().zip(r.values()) {
                    *a += v;
                }
            }
            Record::from_values(chunk[(window - 1) / 2].t, acc.map(|a| a / w))
        })
        .collect();
    Ok(TimeSeries {
        records,
        params: series.params,
        noise: series.noise,
    })
}

/// Time average of `C` over records with `t ≥ plateau_start`.
pub fn residual_concurrence<T: Real>(series: &TimeSeries<T>, plateau_start: u64) -> Result<T> {
    let vals: Vec<T> = series
        .records
        .iter()
        .filter(|r| r.t >= plateau_start)
        .map(|r| r.c)
        .collect();
    if vals.is_empty() {
        return domain(format!("no records at or after t = {plateau_start}"));
    }
    Ok(vals.iter().copied().sum::<T>() / T::from_usize_lossy(vals.len()))
}

/// Default plateau onset: seven classical relaxation times.
pub fn default_plateau_start<T: Real>(gamma_c: T) -> u64 {
    (T::lit(7.0) / gamma_c).ceil().to_u64().unwrap_or(u64::MAX)
}

pub const EXP_FIT_T_MAX: u64 = 10_000;
pub const LM_MAX_ITERATIONS: usize = 500;
pub const LM_REL_TOL: f64 = 1e-10;

fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col].abs() <= T::min_positive_value() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Starting point for the decay fit: `C̄₀` = mean of the last tenth of the
/// window, `A₀ = C(1) − C̄₀`, `γ₀` from a log-linear fit over the first
/// e-folding.
fn initial_guess<T: Real>(t: &[T], c: &[T]) -> [T; 3] {
    let n = c.len();
    let tail = (n / 10).max(1);
    let c_bar = c[n - tail..].iter().copied().sum::<T>() / T::from_usize_lossy(tail);
    let i1 = t.iter().position(|&x| x >= T::one()).unwrap_or(0);
    let a = c[i1] - c_bar;
    let thresh = a / T::E();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in i1..n {
        let d = c[i] - c_bar;
        if (a > T::zero() && d <= thresh) || (a < T::zero() && d >= thresh) || d == T::zero() {
            break;
        }
        xs.push(t[i]);
        ys.push((d / a).ln());
    }
    let span = t[n - 1] - t[0];
    let fallback = T::one() / (T::from_usize_lossy(xs.len().max(1)));
    let gamma = match linear_fit(&xs, &ys) {
        Ok(f) if f.slope < T::zero() && f.slope.is_finite() => -f.slope,
        _ => fallback.max(T::one() / span.max(T::one())),
    };
    [a, gamma, c_bar]
}

/// Damped least squares of `C(t) = A e^{−γt} + C̄` over `t ≤ 10⁴`.
pub fn fit_exp_plateau<T: Real>(series: &TimeSeries<T>) -> Result<DecayFit<T>> {
    let recs: Vec<&Record<T>> = series.records.iter().filter(|r| r.t <= EXP_FIT_T_MAX).collect();
    if recs.len() < 100 {
        return domain(format!("decay fit needs at least 100 records, got {}", recs.len()));
    }
    let t: Vec<T> = recs.iter().map(|r| T::from_u64(r.t).unwrap_or_else(T::nan)).collect();
    let c: Vec<T> = recs.iter().map(|r| r.c).collect();
    let window = (recs[0].t, recs[recs.len() - 1].t);
    let p0 = initial_guess(&t, &c);
    Ok(levenberg_marquardt(&t, &c, p0, window))
}

/// Decay fit starting from an explicit `(A, γ, C̄)` guess.
pub fn fit_exp_plateau_from<T: Real>(t: &[T], c: &[T], guess: [T; 3]) -> Result<DecayFit<T>> {
    if t.len() != c.len() || t.len() < 3 {
        return domain("decay fit needs matching t and C arrays of length ≥ 3");
    }
    let w = (t[0].to_u64().unwrap_or(0), t[t.len() - 1].to_u64().unwrap_or(0));
    Ok(levenberg_marquardt(t, c, guess, w))
}

fn cost_and_model<T: Real>(t: &[T], c: &[T], p: &[T; 3]) -> T {
    t.iter()
        .zip(c)
        .map(|(&ti, &ci)| {
            let r = p[0] * (-p[1] * ti).exp() + p[2] - ci;
            r * r
        })
        .sum()
}

fn levenberg_marquardt<T: Real>(t: &[T], c: &[T], p0: [T; 3], window: (u64, u64)) -> DecayFit<T> {
    let tol = T::lit(LM_REL_TOL).max(T::epsilon() * T::lit(16.0));
    let mut p = p0;
    let mut cost = cost_and_model(t, c, &p);
    let mut lambda = T::lit(1e-3);
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < LM_MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (&ti, &ci) in t.iter().zip(c) {
            let e = (-p[1] * ti).exp();
            let r = p[0] * e + p[2] - ci;
            let j = [e, -p[0] * ti * e, T::one()];
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        loop {
            let mut a = jtj;
            for (k, row) in a.iter_mut().enumerate() {
                row[k] += lambda * jtj[k][k].max(T::min_positive_value());
            }
            let step = solve3(a, jtr.map(|v| -v));
            let accepted = step.and_then(|d| {
                let trial = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
                let tc = cost_and_model(t, c, &trial);
                (tc.is_finite() && tc <= cost).then_some((d, trial, tc))
            });
            match accepted {
                Some((d, trial, tc)) => {
                    let rel = (0..3)
                        .map(|k| d[k].abs() / (trial[k].abs() + T::epsilon()))
                        .fold(T::zero(), T::max);
                    p = trial;
                    cost = tc;
                    lambda = (lambda / T::lit(10.0)).max(T::lit(1e-12));
                    if rel < tol {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                None => {
                    lambda *= T::lit(10.0);
                    if lambda > T::lit(1e16) {
                        // No downhill step left: stationary to working precision.
                        converged = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    let ok = converged && p[1] > T::zero() && p[2] >= T::zero() && p.iter().all(|v| v.is_finite());
    DecayFit {
        amplitude: p[0],
        gamma: p[1],
        c_bar: p[2],
        residual_rms: (cost / T::from_usize_lossy(t.len())).sqrt(),
        window,
        iterations,
        converged: ok,
    }
}

/// Default smoothing window for the noisy/ideal ratio.
pub const NOISE_RATIO_WINDOW: usize = 100;
/// Default floor for the smoothed ratio: the fit stops once the ratio has
/// fallen by about three e-foldings.
pub const NOISE_RATIO_FLOOR: f64 = 0.05;

/// Pointwise realization average of `C`. Values at each time are sorted
/// before summation so the result does not depend on realization order.
pub fn realization_mean<T: Real>(noisy: &[TimeSeries<T>]) -> Result<Vec<T>> {
    let first = noisy.first().ok_or_else(|| Error::Domain("no noisy realizations".into()))?;
    let n = first.len();
    if noisy.iter().any(|s| s.len() != n || s.times() != first.times()) {
        return domain("noisy realizations have mismatched time axes");
    }
    let m = T::from_usize_lossy(noisy.len());
    Ok((0..n)
        .map(|i| {
            let mut v: Vec<T> = noisy.iter().map(|s| s.records[i].c).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            v.into_iter().sum::<T>() / m
        })
        .collect())
}

/// Decay rate of `⟨C_noisy⟩/C_ideal` on the plateau.
///
/// The ratio is formed pointwise (undefined where `C_ideal = 0`), smoothed
/// with a `window`-step moving mean over its defined points, and `ln r` is
/// fitted linearly against `t` for `t ≥ plateau_start`. Non-positive smoothed
/// ratios are excluded; more than half excluded is an error.
///
/// With `floor > 0` the fit window also ends just before the first smoothed
/// ratio at or below `floor`. Concurrence vanishes identically once the
/// averaged noisy state is separable, so `ln r` carries no decay information
/// past that point. At least `window` points must remain.
pub fn fit_noise_rate<T: Real>(
    noisy: &[TimeSeries<T>],
    ideal: &TimeSeries<T>,
    plateau_start: u64,
    window: usize,
    floor: T,
) -> Result<NoiseDecayFit<T>> {
    if !(floor >= T::zero() && floor < T::one()) {
        return domain(format!("ratio floor {floor} outside [0, 1)"));
    }
    let mean = realization_mean(noisy)?;
    if ideal.times() != noisy[0].times() {
        return domain("ideal and noisy series have different time axes");
    }
    if window == 0 || window > mean.len() {
        return domain(format!("ratio window {window} outside [1, {}]", mean.len()));
    }
    let ratio: Vec<Option<T>> = mean
        .iter()
        .zip(&ideal.records)
        .map(|(&m, r)| {
            let q = m / r.c;
            (r.c > T::zero() && q.is_finite()).then_some(q)
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0usize;
    let mut truncated = 0usize;
    for (i, chunk) in ratio.windows(window).enumerate() {
        let t = ideal.records[i + (window - 1) / 2].t;
        if t < plateau_start {
            continue;
        }
        let defined: Vec<T> = chunk.iter().flatten().copied().collect();
        let avg = if defined.is_empty() {
            T::zero()
        } else {
            defined.iter().copied().sum::<T>() / T::from_usize_lossy(defined.len())
        };
        if truncated > 0 || (floor > T::zero() && avg <= floor) {
            truncated += 1;
        } else if avg > T::zero() {
            xs.push(T::from_u64(t).unwrap_or_else(T::nan));
            ys.push(avg.ln());
        } else {
            excluded += 1;
        }
    }
    let total = xs.len() + excluded;
    if total + truncated == 0 {
        return domain(format!("no smoothed ratio points at or after t = {plateau_start}"));
    }
    if floor > T::zero() && xs.len() < window {
        return Err(Error::Fit(format!(
            "only {} ratio points above the floor {floor} after t = {plateau_start}",
            xs.len()
        )));
    }
    if 2 * excluded > total {
        return Err(Error::Fit(format!(
            "{excluded} of {total} ratio points are non-positive"
        )));
    }
    let f = linear_fit(&xs, &ys).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(NoiseDecayFit {
        gamma: (-f.slope).max(T::zero()),
        slope: f.slope,
        stderr: f.slope_stderr,
        window: (
            xs.first().and_then(|v| v.to_u64()).unwrap_or(0),
            xs.last().and_then(|v| v.to_u64()).unwrap_or(0),
        ),
        n_realizations: noisy.len(),
        points_used: xs.len(),
        points_excluded: excluded,
        points_truncated: truncated,
    })
}
