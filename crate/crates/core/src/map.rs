//! Gate-level quantum sawtooth map
//! `Û = e^{ikθ²/2} e^{−iTn̂²/2}` on `N = 2^n_q` momentum levels.
//!
//! One step applies, in order: the rotation program (diagonal in `n`), the
//! offset phase `e^{−iπn}`, the QFT to the phase grid
//! `θ_j = −π + 2πj/N`, the kick program (diagonal in `θ`), the inverse QFT
//! and the offset phase again (`e^{−iπn}` is its own inverse). Both diagonal
//! programs expand the quadratic exponent over the binary digits of the
//! index into `n_q` single-qubit phases and `n_q(n_q−1)/2` controlled phases;
//! constant terms are dropped as global phases.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{Record, TimeSeries};
use crate::entanglement::observe;
use crate::error::{domain, Result};
use crate::gate::{apply_perturbed, Gate};
use crate::qft::qft_gates;
use crate::scalar::{cis, Real};
use crate::state::{StateVector, MAX_QUBITS};

/// `(n_q, K, L)` with `N = 2^n_q`, `T = 2πL/N`, `k = K/T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams<T> {
    pub n_q: usize,
    /// Chaos parameter `K = kT`.
    pub chaos: T,
    /// Number of classical cells on the torus; a positive multiple of 4.
    pub cells: u32,
}

impl<T: Real> MapParams<T> {
    pub fn new(n_q: usize, chaos: T, cells: u32) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n_q) {
            return domain(format!("n_q = {n_q} outside [2, {MAX_QUBITS}]"));
        }
        if cells == 0 || cells % 4 != 0 {
            return domain(format!("L = {cells} must be a positive multiple of 4"));
        }
        if !chaos.is_finite() || chaos < T::zero() {
            return domain(format!("K = {chaos} must be finite and non-negative"));
        }
        Ok(Self { n_q, chaos, cells })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_q
    }

    /// `T = 2πL/N` (quantum resonance).
    pub fn period(&self) -> T {
        T::TAU() * T::lit(f64::from(self.cells)) / T::from_usize_lossy(self.dim())
    }

    /// `k = K/T`.
    pub fn kick_strength(&self) -> T {
        self.chaos / self.period()
    }
}

/// Uniform angle noise of peak-to-peak width `epsilon` on every gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub epsilon: T,
    pub seed: u64,
    pub realization_id: u64,
    /// Treat QFT swaps as physical gates subject to noise. Off by default:
    /// swaps are a relabeling of qubits.
    #[serde(default)]
    pub noisy_swaps: bool,
}

impl<T: Real> NoiseModel<T> {
    pub fn ideal() -> Self {
        Self {
            epsilon: T::zero(),
            seed: 0,
            realization_id: 0,
            noisy_swaps: false,
        }
    }

    pub fn new(epsilon: T, seed: u64, realization_id: u64) -> Result<Self> {
        if !(epsilon >= T::zero()) || !epsilon.is_finite() {
            return domain(format!("noise amplitude {epsilon} must be finite and ≥ 0"));
        }
        Ok(Self {
            epsilon,
            seed,
            realization_id,
            noisy_swaps: false,
        })
    }

    pub fn with_noisy_swaps(mut self, on: bool) -> Self {
        self.noisy_swaps = on;
        self
    }

    pub fn is_ideal(&self) -> bool {
        self.epsilon == T::zero()
    }

    /// ChaCha8 keyed by `seed`, one stream per `realization_id`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.realization_id);
        rng
    }

    pub fn stream(&self) -> NoiseStream<T> {
        NoiseStream {
            model: *self,
            rng: self.rng(),
        }
    }
}

/// A noise model together with its running random stream.
#[derive(Debug, Clone)]
pub struct NoiseStream<T> {
    pub model: NoiseModel<T>,
    rng: ChaCha8Rng,
}

impl<T: Real> NoiseStream<T> {
    pub fn ideal() -> Self {
        NoiseModel::ideal().stream()
    }

    /// Next angle offset `δ ∈ [−ε/2, ε/2)`.
    pub fn draw(&mut self) -> T {
        noise_offset(self.model.epsilon, &mut self.rng)
    }
}

fn noise_offset<T: Real, R: Rng + ?Sized>(epsilon: T, rng: &mut R) -> T {
    if epsilon == T::zero() {
        return T::zero();
    }
    let u: f64 = rng.gen();
    epsilon * (T::lit(u) - T::half())
}

/// `φ + δ` with `δ` uniform on `[−ε/2, ε/2)`; exactly `φ` when `ε = 0`.
pub fn noisy_angle<T: Real, R: Rng + ?Sized>(phi: T, noise: &NoiseModel<T>, rng: &mut R) -> T {
    phi + noise_offset(noise.epsilon, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub single_phase: usize,
    pub two_qubit_phase: usize,
    pub hadamard: usize,
    pub swap: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.single_phase + self.two_qubit_phase + self.hadamard + self.swap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateProgram<T> {
    pub n_q: usize,
    pub gates: Vec<Gate<T>>,
}

impl<T: Real> GateProgram<T> {
    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Phase { .. } => c.single_phase += 1,
                Gate::CPhase { .. } => c.two_qubit_phase += 1,
                Gate::Hadamard { .. } => c.hadamard += 1,
                Gate::Swap { .. } => c.swap += 1,
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Runs the program, perturbing each physical gate by a fresh noise draw.
    pub fn run(&self, state: &mut StateVector<T>, noise: &mut NoiseStream<T>) -> Result<()> {
        if state.n_q() != self.n_q {
            return domain(format!(
                "program for {} qubits applied to a {}-qubit state",
                self.n_q,
                state.n_q()
            ));
        }
        let perturb_swaps = noise.model.noisy_swaps;
        for g in &self.gates {
            let delta = match g {
                Gate::Swap { .. } if !perturb_swaps => T::zero(),
                _ => noise.draw(),
            };
            apply_perturbed(state, g, delta, perturb_swaps)?;
        }
        Ok(())
    }
}

/// Powers of two as `f64`; exponents may be negative.
fn pow2(e: i64) -> f64 {
    2f64.powi(e as i32)
}

fn angle<T: Real>(phi: f64) -> T {
    T::lit(phi.rem_euclid(std::f64::consts::TAU))
}

/// Diagonal program for `e^{ikθ_j²/2}`, `θ_j = −π + 2πj/N`.
pub fn kick_program<T: Real>(n_q: usize, k: T) -> GateProgram<T> {
    let n = n_q as i64;
    let k = k.to_f64_lossy();
    let c = std::f64::consts::TAU / pow2(n);
    let mut gates = Vec::with_capacity(n_q * (n_q + 1) / 2);
    for i in 1..=n {
        let a = 0.5 * k * (c * c * pow2(2 * (n - i)) - std::f64::consts::TAU * c * pow2(n - i));
        gates.push(Gate::phase(i as usize, angle(a)));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let a = k * c * c * pow2(2 * n - i - j);
            gates.push(Gate::cphase(i as usize, j as usize, angle(a)));
        }
    }
    GateProgram { n_q, gates }
}

/// Diagonal program for `e^{−iTn²/2}`.
pub fn rotation_program<T: Real>(n_q: usize, period: T) -> GateProgram<T> {
    let n = n_q as i64;
    let t = period.to_f64_lossy();
    let mut gates = Vec::with_capacity(n_q * (n_q + 1) / 2);
    for i in 1..=n {
        gates.push(Gate::phase(i as usize, angle(-t * pow2(2 * (n - i) - 1))));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            gates.push(Gate::cphase(i as usize, j as usize, angle(-t * pow2(2 * n - i - j))));
        }
    }
    GateProgram { n_q, gates }
}

pub fn build_kick_program<T: Real>(p: &MapParams<T>) -> GateProgram<T> {
    kick_program(p.n_q, p.kick_strength())
}

pub fn build_rotation_program<T: Real>(p: &MapParams<T>) -> GateProgram<T> {
    rotation_program(p.n_q, p.period())
}

/// Full gate sequence of one map step for raw `(k, T)`.
pub fn step_program_raw<T: Real>(n_q: usize, k: T, period: T) -> GateProgram<T> {
    let offset = Gate::phase(n_q, T::PI());
    let mut gates = rotation_program(n_q, period).gates;
    gates.push(offset);
    gates.extend(qft_gates(n_q, false));
    gates.extend(kick_program(n_q, k).gates);
    gates.extend(qft_gates(n_q, true));
    gates.push(offset);
    GateProgram { n_q, gates }
}

pub fn build_step_program<T: Real>(p: &MapParams<T>) -> GateProgram<T> {
    step_program_raw(p.n_q, p.kick_strength(), p.period())
}

/// Closed-form gate counts of one step: two diagonal programs, two offset
/// phases and a QFT/inverse-QFT pair.
pub fn expected_step_counts(n_q: usize) -> GateCounts {
    let pairs = n_q * (n_q - 1) / 2;
    GateCounts {
        single_phase: 2 * n_q + 2,
        two_qubit_phase: 2 * pairs + 2 * pairs,
        hadamard: 2 * n_q,
        swap: 2 * (n_q / 2),
    }
}

/// Cached step program for fixed parameters.
#[derive(Debug, Clone)]
pub struct QuantumMap<T> {
    pub params: MapParams<T>,
    pub program: GateProgram<T>,
}

impl<T: Real> QuantumMap<T> {
    pub fn new(params: MapParams<T>) -> Self {
        Self {
            program: build_step_program(&params),
            params,
        }
    }

    pub fn step(&self, state: &mut StateVector<T>, noise: &mut NoiseStream<T>) -> Result<()> {
        self.program.run(state, noise)
    }
}

/// One gate-level map step in place.
pub fn map_step<T: Real>(
    state: &mut StateVector<T>,
    p: &MapParams<T>,
    noise: &mut NoiseStream<T>,
) -> Result<()> {
    if state.n_q() != p.n_q {
        return domain(format!("state has {} qubits, params {}", state.n_q(), p.n_q));
    }
    build_step_program(p).run(state, noise)
}

/// Dense `O(N²)` reference step for raw `(k, T)`.
pub fn direct_step_raw<T: Real>(state: &mut StateVector<T>, k: T, period: T) -> Result<()> {
    let n = state.dim();
    let nf = n as f64;
    let (k, t) = (k.to_f64_lossy(), period.to_f64_lossy());
    let tau = std::f64::consts::TAU;
    // ω^m for m in 0..N
    let roots: Vec<Complex<T>> = (0..n).map(|m| cis(T::lit(tau * m as f64 / nf))).collect();
    let sign = |m: usize| if m % 2 == 0 { T::one() } else { -T::one() };
    let norm = T::one() / T::lit(nf.sqrt());

    let psi: Vec<Complex<T>> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(m, a)| {
            let ph = (0.5 * t * (m as f64) * (m as f64)).rem_euclid(tau);
            a * cis(T::lit(-ph))
        })
        .collect();
    // ψ(θ_j) = N^{-1/2} Σ_m e^{imθ_j} ψ_m, e^{imθ_j} = (−1)^m ω^{mj}
    let kicked: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let s = psi
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc: Complex<T>, (m, a)| acc + a * roots[(m * j) % n].scale(sign(m)));
            let theta = -std::f64::consts::PI + tau * j as f64 / nf;
            s.scale(norm) * cis(angle::<T>(0.5 * k * theta * theta))
        })
        .collect();
    for (m, out) in state.amplitudes_mut().iter_mut().enumerate() {
        let s = kicked
            .iter()
            .enumerate()
            .fold(Complex::zero(), |acc: Complex<T>, (j, a)| acc + a * roots[(n - (m * j) % n) % n].scale(sign(m)));
        *out = s.scale(norm);
    }
    Ok(())
}

/// Dense reference step `e^{ikθ²/2} e^{−iTn²/2}` with an explicit Fourier
/// matrix on the shifted phase grid. Intended for `n_q ≤ 12`.
pub fn direct_step<T: Real>(state: &mut StateVector<T>, p: &MapParams<T>) -> Result<()> {
    if state.n_q() != p.n_q {
        return domain(format!("state has {} qubits, params {}", state.n_q(), p.n_q));
    }
    direct_step_raw(state, p.kick_strength(), p.period())
}

fn record<T: Real>(t: u64, state: &StateVector<T>) -> Result<Record<T>> {
    let o = observe(state)?;
    Ok(Record {
        t,
        c: o.concurrence,
        w: o.w,
        q14: o.q14,
        q23: o.q23,
        norm: o.norm,
    })
}

/// Iterates the map `t_max` times, recording observables after every step
/// (`t = 1..=t_max`; `t_max = 0` gives an empty series). `observer` sees
/// each record and the state it was computed from.
pub fn evolve<T, F>(
    state: &mut StateVector<T>,
    p: &MapParams<T>,
    t_max: u64,
    noise: &NoiseModel<T>,
    mut observer: F,
) -> Result<TimeSeries<T>>
where
    T: Real,
    F: FnMut(&Record<T>, &StateVector<T>),
{
    if state.n_q() != p.n_q {
        return domain(format!("state has {} qubits, params {}", state.n_q(), p.n_q));
    }
    let map = QuantumMap::new(*p);
    let mut stream = noise.stream();
    let mut series = TimeSeries::new(Some(*p), Some(*noise));
    series.records.reserve(t_max as usize);
    for t in 1..=t_max {
        map.step(state, &mut stream)?;
        let r = record(t, state)?;
        observer(&r, state);
        series.records.push(r);
    }
    Ok(series)
}
