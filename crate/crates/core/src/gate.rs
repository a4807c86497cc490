//! Elementary gate set and its in-place action on a [`StateVector`].
//!
//! Every gate is a rotation `exp(−iφG)` by an angle `φ` around a fixed
//! Hermitian generator `G`, up to a global phase:
//!
//! | gate      | generator                 | ideal angle |
//! |-----------|---------------------------|-------------|
//! | `Phase`   | `−|1⟩⟨1|`                 | `φ`         |
//! | `CPhase`  | `−|11⟩⟨11|`               | `φ`         |
//! | `Hadamard`| `(X + Z)/√2`              | `π/2`       |
//! | `Swap`    | singlet projector         | `π`         |
//!
//! [`apply_perturbed`] shifts that angle by `δ`; `δ = 0` takes exactly the
//! same code path as [`apply_gate`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{cis, Real};
use crate::state::{qubit_mask, StateVector};

/// Qubits are numbered from 1 (most significant bit of the momentum index).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate<T> {
    /// Multiplies amplitudes whose `qubit` bit is 1 by `e^{iφ}`.
    Phase { qubit: usize, angle: T },
    /// Multiplies amplitudes whose two bits are both 1 by `e^{iφ}`.
    CPhase { a: usize, b: usize, angle: T },
    Hadamard { qubit: usize },
    Swap { a: usize, b: usize },
}

impl<T: Real> Gate<T> {
    pub fn phase(qubit: usize, angle: T) -> Self {
        Gate::Phase { qubit, angle }
    }

    pub fn cphase(a: usize, b: usize, angle: T) -> Self {
        Gate::CPhase { a, b, angle }
    }

    pub fn hadamard(qubit: usize) -> Self {
        Gate::Hadamard { qubit }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }

    /// Rotation angle of the gate in its generator parametrization.
    pub fn angle(&self) -> T {
        match *self {
            Gate::Phase { angle, .. } | Gate::CPhase { angle, .. } => angle,
            Gate::Hadamard { .. } => T::FRAC_PI_2(),
            Gate::Swap { .. } => T::PI(),
        }
    }

    /// Same gate with the phase angle conjugated. Hadamard and swap are
    /// self-inverse.
    pub fn inverse(&self) -> Self {
        match *self {
            Gate::Phase { qubit, angle } => Gate::Phase { qubit, angle: -angle },
            Gate::CPhase { a, b, angle } => Gate::CPhase { a, b, angle: -angle },
            g => g,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::CPhase { .. } | Gate::Swap { .. })
    }

    /// Checks that the qubit indices are valid for an `n_q`-qubit register.
    pub fn validate(&self, n_q: usize) -> Result<()> {
        let in_range = |q: usize| (1..=n_q).contains(&q);
        match *self {
            Gate::Phase { qubit, .. } | Gate::Hadamard { qubit } => {
                if !in_range(qubit) {
                    return domain(format!("qubit {qubit} outside [1, {n_q}]"));
                }
            }
            Gate::CPhase { a, b, .. } | Gate::Swap { a, b } => {
                if !in_range(a) || !in_range(b) {
                    return domain(format!("qubits ({a}, {b}) outside [1, {n_q}]"));
                }
                if a == b {
                    return domain(format!("two-qubit gate on repeated qubit {a}"));
                }
            }
        }
        Ok(())
    }
}

/// Applies `gate` exactly.
pub fn apply_gate<T: Real>(state: &mut StateVector<T>, gate: &Gate<T>) -> Result<()> {
    apply_perturbed(state, gate, T::zero(), true)
}

/// Applies `gate` with its rotation angle shifted by `delta`.
///
/// When `perturb_swap` is false a swap is treated as a relabeling of qubits
/// and `delta` is ignored for it.
pub fn apply_perturbed<T: Real>(
    state: &mut StateVector<T>,
    gate: &Gate<T>,
    delta: T,
    perturb_swap: bool,
) -> Result<()> {
    let n_q = state.n_q();
    gate.validate(n_q)?;
    let amp = state.amplitudes_mut();
    match *gate {
        Gate::Phase { qubit, angle } => phase(amp, qubit_mask(n_q, qubit), angle + delta),
        Gate::CPhase { a, b, angle } => {
            cphase(amp, qubit_mask(n_q, a), qubit_mask(n_q, b), angle + delta)
        }
        Gate::Hadamard { qubit } => {
            let m = qubit_mask(n_q, qubit);
            if delta == T::zero() {
                hadamard(amp, m)
            } else {
                rotated_hadamard(amp, m, delta)
            }
        }
        Gate::Swap { a, b } => {
            let (ma, mb) = (qubit_mask(n_q, a), qubit_mask(n_q, b));
            if delta == T::zero() || !perturb_swap {
                swap(amp, ma, mb)
            } else {
                rotated_swap(amp, ma, mb, delta)
            }
        }
    }
    Ok(())
}

fn phase<T: Real>(amp: &mut [Complex<T>], mask: usize, angle: T) {
    let ph = cis(angle);
    for chunk in amp.chunks_mut(2 * mask) {
        for a in &mut chunk[mask..] {
            *a = *a * ph;
        }
    }
}

fn cphase<T: Real>(amp: &mut [Complex<T>], ma: usize, mb: usize, angle: T) {
    let ph = cis(angle);
    let (hi, lo) = if ma > mb { (ma, mb) } else { (mb, ma) };
    for chunk in amp.chunks_mut(2 * hi) {
        for sub in chunk[hi..].chunks_mut(2 * lo) {
            for a in &mut sub[lo..] {
                *a = *a * ph;
            }
        }
    }
}

fn hadamard<T: Real>(amp: &mut [Complex<T>], mask: usize) {
    let h = T::FRAC_1_SQRT_2();
    for chunk in amp.chunks_mut(2 * mask) {
        let (lo, hi) = chunk.split_at_mut(mask);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = (a + b).scale(h);
            *y = (a - b).scale(h);
        }
    }
}

/// `i·exp(−i(π/2 + δ)(X+Z)/√2) = cos δ · H − i sin δ · I`.
fn rotated_hadamard<T: Real>(amp: &mut [Complex<T>], mask: usize, delta: T) {
    let (s, c) = delta.sin_cos();
    let ch = c * T::FRAC_1_SQRT_2();
    let mis = Complex::new(T::zero(), -s);
    for chunk in amp.chunks_mut(2 * mask) {
        let (lo, hi) = chunk.split_at_mut(mask);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = (a + b).scale(ch) + a * mis;
            *y = (a - b).scale(ch) + b * mis;
        }
    }
}

/// Calls `f(i, j)` for every index pair where `i` has bits (hi=0, lo=1) and
/// `j = i` with the two bits exchanged.
fn for_swap_pairs<T, F>(amp: &mut [Complex<T>], ma: usize, mb: usize, mut f: F)
where
    F: FnMut(&mut Complex<T>, &mut Complex<T>),
{
    let (hi, lo) = if ma > mb { (ma, mb) } else { (mb, ma) };
    for chunk in amp.chunks_mut(2 * hi) {
        let (l, r) = chunk.split_at_mut(hi);
        for base in (0..hi).step_by(2 * lo) {
            for o in base..base + lo {
                f(&mut l[o + lo], &mut r[o]);
            }
        }
    }
}

fn swap<T: Real>(amp: &mut [Complex<T>], ma: usize, mb: usize) {
    for_swap_pairs(amp, ma, mb, std::mem::swap);
}

/// `exp(−i(π + δ)P_s) = I − (1 + e^{−iδ}) P_s` with `P_s` the singlet
/// projector of the two qubits.
fn rotated_swap<T: Real>(amp: &mut [Complex<T>], ma: usize, mb: usize, delta: T) {
    let f = (Complex::new(T::one(), T::zero()) + cis(-delta)).scale(T::half());
    for_swap_pairs(amp, ma, mb, |x, y| {
        let d = (*x - *y) * f;
        *x = *x - d;
        *y = *y + d;
    });
}
