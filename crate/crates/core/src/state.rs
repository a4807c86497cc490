//! Dense state vector over the momentum basis.
//!
//! Index `n` runs over `0..N` with `N = 2^n_q`. Qubit 1 is the most
//! significant bit of `n`, qubit `n_q` the least significant one, so the
//! binary digits `a_1 a_2 … a_{n_q}` of the momentum map onto qubits in order.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{domain, Result};
use crate::scalar::{Cplx, Real};

/// Largest register this crate will allocate.
pub const MAX_QUBITS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_q: usize,
    amp: Vec<Cplx<T>>,
}

/// Bit mask of qubit `q` (1-based, qubit 1 = MSB) in an `n_q`-qubit index.
#[inline]
pub(crate) fn qubit_mask(n_q: usize, q: usize) -> usize {
    1usize << (n_q - q)
}

impl<T: Real> StateVector<T> {
    fn check_size(n_q: usize) -> Result<()> {
        if n_q == 0 || n_q > MAX_QUBITS {
            return domain(format!("qubit count {n_q} outside [1, {MAX_QUBITS}]"));
        }
        Ok(())
    }

    /// All-zero vector. Not normalized; used as a scratch buffer.
    pub fn zeros(n_q: usize) -> Result<Self> {
        Self::check_size(n_q)?;
        Ok(Self {
            n_q,
            amp: vec![Complex::zero(); 1 << n_q],
        })
    }

    /// Computational basis state `|n⟩`.
    pub fn basis_state(n_q: usize, n: usize) -> Result<Self> {
        let mut s = Self::zeros(n_q)?;
        if n >= s.dim() {
            return domain(format!("basis index {n} out of range for {n_q} qubits"));
        }
        s.amp[n] = Complex::one();
        Ok(s)
    }

    /// `(|00⟩ + |11⟩)|φ⟩/√2` with `|φ⟩` the uniform superposition of the
    /// `n_q − 2` least significant qubits. Nonzero on `[0, N/4) ∪ [3N/4, N)`.
    pub fn initial_state(n_q: usize) -> Result<Self> {
        if n_q < 2 {
            return domain(format!("initial state needs at least 2 qubits, got {n_q}"));
        }
        let mut s = Self::zeros(n_q)?;
        let quarter = s.dim() / 4;
        let a = Complex::new(T::one() / T::from_usize_lossy(2 * quarter).sqrt(), T::zero());
        let dim = s.dim();
        s.amp[..quarter].fill(a);
        s.amp[dim - quarter..].fill(a);
        Ok(s)
    }

    /// Equal-weight superposition of every basis state.
    pub fn uniform(n_q: usize) -> Result<Self> {
        let mut s = Self::zeros(n_q)?;
        let a = Complex::new(T::one() / T::from_usize_lossy(s.dim()).sqrt(), T::zero());
        s.amp.fill(a);
        Ok(s)
    }

    /// Wraps an amplitude array whose length must be a power of two ≥ 2.
    /// The vector is taken as is; call [`normalize`](Self::normalize) if needed.
    pub fn from_amplitudes(amp: Vec<Cplx<T>>) -> Result<Self> {
        let len = amp.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!("amplitude length {len} is not a power of two ≥ 2"));
        }
        let n_q = len.trailing_zeros() as usize;
        Self::check_size(n_q)?;
        Ok(Self { n_q, amp })
    }

    /// Haar-like random pure state: i.i.d. Gaussian components, normalized.
    pub fn random<R: Rng + ?Sized>(n_q: usize, rng: &mut R) -> Result<Self> {
        let mut s = Self::zeros(n_q)?;
        for a in s.amp.iter_mut() {
            // Box-Muller keeps this independent of rand_distr.
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s2, c2) = (std::f64::consts::TAU * u2).sin_cos();
            *a = Complex::new(T::lit(r * c2), T::lit(r * s2));
        }
        s.normalize();
        Ok(s)
    }

    #[inline]
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    /// Hilbert space dimension `N = 2^n_q`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amp
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Cplx<T>> {
        self.amp
    }

    pub fn norm_sqr(&self) -> T {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            let inv = T::one() / n;
            for a in self.amp.iter_mut() {
                *a = a.scale(inv);
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.dim() != other.dim() {
            return domain("inner product of states with different dimensions");
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// The four length-`N/4` blocks `φ_{a₁a₂}` selected by the two most
    /// significant qubits, in the order 00, 01, 10, 11.
    pub fn quarter_blocks(&self) -> Result<[&[Cplx<T>]; 4]> {
        if self.n_q < 2 {
            return domain("quarter blocks need at least 2 qubits");
        }
        let q = self.dim() / 4;
        Ok([
            &self.amp[..q],
            &self.amp[q..2 * q],
            &self.amp[2 * q..3 * q],
            &self.amp[3 * q..],
        ])
    }

    /// Total probability `W_{a₁a₂}` in each quarter of the momentum range,
    /// returned as `[W₀₀, W₀₁, W₁₀, W₁₁]`.
    pub fn partition_probabilities(&self) -> Result<[T; 4]> {
        let blocks = self.quarter_blocks()?;
        let mut w = [T::zero(); 4];
        for (wi, b) in w.iter_mut().zip(blocks) {
            *wi = b.iter().map(|a| a.norm_sqr()).sum();
        }
        Ok(w)
    }

    /// Largest elementwise distance to `other` after removing the best global
    /// phase (aligned on the largest amplitude of `other`).
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return domain("comparing states with different dimensions");
        }
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > T::zero() {
            overlap.unscale(overlap.norm()).conj()
        } else {
            Complex::one()
        };
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(T::zero(), T::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type S = StateVector<f64>;

    #[test]
    fn basis_states() {
        let s = S::basis_state(2, 0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));
        let s = S::basis_state(2, 3).unwrap();
        assert_eq!(s.amplitudes()[3], Complex::new(1.0, 0.0));
        assert_abs_diff_eq!(s.norm_sqr(), 1.0);
        let s = S::basis_state(3, 5).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            assert_eq!(a.re, if i == 5 { 1.0 } else { 0.0 });
            assert_eq!(a.im, 0.0);
        }
        assert!(S::basis_state(2, 4).is_err());
    }

    #[test]
    fn initial_state_layout() {
        let s = S::initial_state(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        assert_abs_diff_eq!(re.as_slice(), [h, 0.0, 0.0, h].as_slice(), epsilon = 1e-15);

        let s = S::initial_state(3).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if [0, 1, 6, 7].contains(&i) { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(a.re, want, epsilon = 1e-15);
        }

        let s = S::initial_state(4).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);
        let w = s.partition_probabilities().unwrap();
        assert_abs_diff_eq!(w.as_slice(), [0.5, 0.0, 0.0, 0.5].as_slice(), epsilon = 1e-14);

        assert!(S::initial_state(1).is_err());
    }

    #[test]
    fn partitions() {
        let w = S::uniform(5).unwrap().partition_probabilities().unwrap();
        assert_abs_diff_eq!(w.as_slice(), [0.25; 4].as_slice(), epsilon = 1e-14);
        let w = S::basis_state(3, 5).unwrap().partition_probabilities().unwrap();
        assert_eq!(w, [0.0, 0.0, 1.0, 0.0]);
        assert!(S::basis_state(1, 0).unwrap().partition_probabilities().is_err());
    }

    #[test]
    fn from_amplitudes_checks_length() {
        assert!(S::from_amplitudes(vec![Complex::new(1.0, 0.0); 3]).is_err());
        assert!(S::from_amplitudes(vec![Complex::new(1.0, 0.0); 1]).is_err());
        assert_eq!(S::from_amplitudes(vec![Complex::new(0.5, 0.0); 4]).unwrap().n_q(), 2);
    }

    #[test]
    fn random_is_normalized() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s = S::random(6, &mut rng).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-13);
        let w: f64 = s.partition_probabilities().unwrap().iter().sum();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-10);
    }
}
