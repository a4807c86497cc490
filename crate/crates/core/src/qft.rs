//! Quantum Fourier transform as a gate sequence.
//!
//! Convention: `(Fψ)_m = N^{-1/2} Σ_n e^{+2πimn/N} ψ_n`, qubit 1 = MSB.

use crate::error::Result;
use crate::gate::{apply_gate, Gate};
use crate::scalar::Real;
use crate::state::StateVector;

/// Gates of the (inverse) QFT on `n_q` qubits: `n_q` Hadamards,
/// `n_q(n_q−1)/2` controlled phases and `⌊n_q/2⌋` swaps.
pub fn qft_gates<T: Real>(n_q: usize, inverse: bool) -> Vec<Gate<T>> {
    let mut gates = Vec::with_capacity(n_q * (n_q + 1) / 2 + n_q / 2);
    for j in 1..=n_q {
        gates.push(Gate::hadamard(j));
        for k in j + 1..=n_q {
            // R_{k-j+1}: phase 2π / 2^{k-j+1}
            let angle = T::TAU() / T::lit(2f64.powi((k - j + 1) as i32));
            gates.push(Gate::cphase(k, j, angle));
        }
    }
    for j in 1..=n_q / 2 {
        gates.push(Gate::swap(j, n_q + 1 - j));
    }
    if inverse {
        gates.reverse();
        for g in gates.iter_mut() {
            *g = g.inverse();
        }
    }
    gates
}

/// Applies the QFT (or its inverse) in place.
pub fn qft<T: Real>(state: &mut StateVector<T>, inverse: bool) -> Result<()> {
    for g in qft_gates(state.n_q(), inverse) {
        apply_gate(state, &g)?;
    }
    Ok(())
}
