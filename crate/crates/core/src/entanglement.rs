//! Entanglement of the two most significant qubits.
//!
//! The concurrence is `max{0, λ₁ − λ₂ − λ₃ − λ₄}` where `λᵢ²` are the
//! eigenvalues of `ρρ̃`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, sorted in decreasing
//! order. [`concurrence`] obtains that spectrum without forming matrix square
//! roots: with `ρ = W W†` (`W = V√D` from the eigen-decomposition of `ρ`),
//! `ρρ̃` has the same eigenvalues as `τ τ†` for the complex-symmetric
//! `τ = Wᵀ (σ_y⊗σ_y) W`, which is Hermitian and handled by the Jacobi solver.
//! [`concurrence_by_matrix_sqrt`] follows the `√(√ρ ρ̃ √ρ)` form literally
//! and is kept as a cross-check.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{self, hermitian_eigen, Mat4};
use crate::scalar::{Cplx, Real};
use crate::state::StateVector;

/// 4×4 density matrix over `|a₁a₂⟩ ∈ {00, 01, 10, 11}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState<T> {
    pub rho: Mat4<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult<T> {
    pub concurrence: T,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub lambdas: [T; 4],
    /// Entanglement of formation in ebits.
    pub entanglement_of_formation: T,
}

/// `σ_y ⊗ σ_y` is real: the anti-diagonal `(−1, 1, 1, −1)`.
const SPIN_FLIP_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];

fn spin_flip<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    // (S a* S)_{ij} = s_i s_j a*_{3-i, 3-j}
    let mut out = linalg::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let s = T::lit(SPIN_FLIP_SIGNS[i] * SPIN_FLIP_SIGNS[j]);
            out[i][j] = a[3 - i][3 - j].conj().scale(s);
        }
    }
    out
}

impl<T: Real> ReducedState<T> {
    pub fn new(rho: Mat4<T>) -> Self {
        Self { rho }
    }

    /// Density matrix of a pure two-qubit state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
    pub fn from_pure(psi: [Cplx<T>; 4]) -> Self {
        let mut rho = linalg::zeros();
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self { rho }
    }

    /// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
    pub fn werner(p: T) -> Self {
        let h = T::FRAC_1_SQRT_2();
        let z = Complex::zero();
        let bell = Self::from_pure([Complex::new(h, T::zero()), z, z, Complex::new(h, T::zero())]);
        let mut rho = linalg::zeros();
        let quarter = T::lit(0.25);
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = bell.rho[i][j].scale(p);
            }
            rho[i][i] = rho[i][i] + Complex::new((T::one() - p) * quarter, T::zero());
        }
        Self { rho }
    }

    pub fn trace(&self) -> T {
        linalg::trace(&self.rho).re
    }

    pub fn eigenvalues(&self) -> [T; 4] {
        hermitian_eigen(&self.rho).values
    }

    /// Checks Hermiticity (`10⁻¹²`), unit trace (`10⁻¹⁰`) and positivity
    /// (`λ_min ≥ −10⁻¹⁰`), with tolerances scaled for single precision.
    pub fn validate(&self) -> Result<()> {
        let (herm_tol, tol) = if T::roundoff() < T::lit(1e-6) {
            (T::lit(1e-12), T::roundoff())
        } else {
            (T::roundoff(), T::roundoff())
        };
        let h = linalg::hermiticity_defect(&self.rho);
        if h > herm_tol {
            return Err(Error::Numerical(format!("density matrix not Hermitian: defect {h}")));
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > tol {
            return Err(Error::Numerical(format!("density matrix trace {tr} ≠ 1")));
        }
        let ev = self.eigenvalues();
        if ev[0] < -tol {
            return Err(Error::Numerical(format!("density matrix not PSD: eigenvalues {ev:?}")));
        }
        Ok(())
    }
}

/// Partial trace over all but the two most significant qubits.
pub fn reduce_top_two<T: Real>(state: &StateVector<T>) -> Result<ReducedState<T>> {
    let blocks = state.quarter_blocks()?;
    let mut rho = linalg::zeros();
    for a in 0..4 {
        for b in a..4 {
            let s = blocks[a]
                .iter()
                .zip(blocks[b])
                .fold(Complex::zero(), |acc, (x, y)| acc + x * y.conj());
            rho[a][b] = s;
            rho[b][a] = s.conj();
        }
        rho[a][a].im = T::zero();
    }
    Ok(ReducedState { rho })
}

fn clamp_spectrum<T: Real>(values: [T; 4], what: &str) -> Result<[T; 4]> {
    let tol = T::roundoff();
    if values.iter().any(|&v| v < -tol) {
        return Err(Error::Numerical(format!(
            "{what} has eigenvalues below −{tol}: {values:?}"
        )));
    }
    Ok(values.map(|v| v.max(T::zero())))
}

fn finish<T: Real>(mut lambdas: [T; 4]) -> ConcurrenceResult<T> {
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let c = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
        .max(T::zero())
        .min(T::one());
    ConcurrenceResult {
        concurrence: c,
        lambdas,
        entanglement_of_formation: entanglement_of_formation(c),
    }
}

/// Wootters concurrence through the `τ τ†` spectrum (see module docs).
pub fn concurrence<T: Real>(rs: &ReducedState<T>) -> Result<ConcurrenceResult<T>> {
    let eig = hermitian_eigen(&rs.rho);
    let d = clamp_spectrum(eig.values, "ρ")?;
    // W = V √D
    let mut w = eig.vectors;
    for row in w.iter_mut() {
        for (k, z) in row.iter_mut().enumerate() {
            *z = z.scale(d[k].sqrt());
        }
    }
    // τ = Wᵀ S W, with S W = rows reversed and signed.
    let mut sw = linalg::zeros();
    for i in 0..4 {
        for k in 0..4 {
            sw[i][k] = w[3 - i][k].scale(T::lit(SPIN_FLIP_SIGNS[i]));
        }
    }
    let tau = linalg::mul(&linalg::transpose(&w), &sw);
    let tt = linalg::mul(&tau, &linalg::adjoint(&tau));
    let mu = clamp_spectrum(hermitian_eigen(&tt).values, "ρρ̃")?;
    Ok(finish(mu.map(|m| m.sqrt())))
}

/// Concurrence from the eigenvalues of `√(√ρ ρ̃ √ρ)`.
pub fn concurrence_by_matrix_sqrt<T: Real>(rs: &ReducedState<T>) -> Result<ConcurrenceResult<T>> {
    let eig = hermitian_eigen(&rs.rho);
    let d = clamp_spectrum(eig.values, "ρ")?;
    let sqrt_rho = linalg::from_eigen(&d.map(|x| x.sqrt()), &eig.vectors);
    let r = linalg::mul(&linalg::mul(&sqrt_rho, &spin_flip(&rs.rho)), &sqrt_rho);
    let mu = clamp_spectrum(hermitian_eigen(&r).values, "√ρ ρ̃ √ρ")?;
    Ok(finish(mu.map(|m| m.sqrt())))
}

/// Base-2 binary entropy with `h(0) = h(1) = 0`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let term = |p: T| if p <= T::zero() { T::zero() } else { -p * p.log2() };
    term(x) + term(T::one() - x)
}

/// `E_f(C) = h((1 + √(1 − C²))/2)`.
pub fn entanglement_of_formation<T: Real>(c: T) -> T {
    let c = c.max(T::zero()).min(T::one());
    binary_entropy((T::one() + (T::one() - c * c).sqrt()) * T::half())
}

/// Von Neumann entropy of the reduced state in bits.
pub fn von_neumann_entropy<T: Real>(rs: &ReducedState<T>) -> T {
    rs.eigenvalues()
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.log2())
        .sum()
}

/// `(Q₁₄, Q₂₃) = (2|⟨φ₀₀|φ₁₁⟩|, 2|⟨φ₀₁|φ₁₀⟩|)` over the unnormalized quarter
/// blocks of the state.
pub fn scalar_product_diagnostics<T: Real>(state: &StateVector<T>) -> Result<(T, T)> {
    let b = state.quarter_blocks()?;
    let dot = |x: &[Cplx<T>], y: &[Cplx<T>]| {
        x.iter()
            .zip(y)
            .fold(Complex::<T>::zero(), |acc, (p, q)| acc + p.conj() * q)
    };
    let two = T::two();
    Ok((two * dot(b[0], b[3]).norm(), two * dot(b[1], b[2]).norm()))
}

/// `Σ_n |ψ_n − ψ_{(N−n) mod N}|²`, zero for states symmetric under `n → N − n`.
pub fn symmetry_defect<T: Real>(state: &StateVector<T>) -> T {
    let a = state.amplitudes();
    let n = a.len();
    (0..n).map(|i| (a[i] - a[(n - i) % n]).norm_sqr()).sum()
}

/// Everything the evolution records about the state at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables<T> {
    pub concurrence: T,
    pub w: [T; 4],
    pub q14: T,
    pub q23: T,
    pub norm: T,
}

pub fn observe<T: Real>(state: &StateVector<T>) -> Result<Observables<T>> {
    if state.n_q() < 2 {
        return domain("observables need at least 2 qubits");
    }
    let rs = reduce_top_two(state)?;
    let c = concurrence(&rs)?;
    let (q14, q23) = scalar_product_diagnostics(state)?;
    Ok(Observables {
        concurrence: c.concurrence,
        w: state.partition_probabilities()?,
        q14,
        q23,
        norm: state.norm(),
    })
}
