//! Gate-level simulation of the quantum sawtooth map with two-qubit
//! entanglement tracking.
//!
//! The state of `n_q` qubits encodes `N = 2^n_q` momentum levels on a torus.
//! After every map step the two most significant qubits are traced down to a
//! 4×4 density matrix whose Wootters concurrence is recorded. A classical
//! ensemble of the same map supplies the diffusion rate that sets the
//! expected relaxation rate, and [`analysis`] holds the fits.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the precision.
//!
//! ```
//! use sawtooth_core::{evolve, observe, MapParamsF64, NoiseModelF64, StateVectorF64};
//!
//! let p = MapParamsF64::new(6, 0.5, 4).unwrap();
//! let mut psi = StateVectorF64::initial_state(6).unwrap();
//! assert!((observe(&psi).unwrap().concurrence - 1.0).abs() < 1e-12);
//! let series = evolve(&mut psi, &p, 10, &NoiseModelF64::ideal(), |_, _| {}).unwrap();
//! assert_eq!(series.times(), (1..=10).collect::<Vec<_>>());
//! ```

pub mod analysis;
pub mod classical;
pub mod entanglement;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod map;
pub mod qft;
pub mod scalar;
pub mod state;

pub use analysis::{
    fit_exp_plateau, fit_noise_rate, moving_average, residual_concurrence, scaling_fit, DecayFit,
    NoiseDecayFit, Record, ScalingFit, TimeSeries,
};
pub use classical::{conductance, estimate_d0, gamma_c, ClassicalEnsemble, DiffusionEstimate};
pub use entanglement::{concurrence, observe, reduce_top_two, ConcurrenceResult, Observables, ReducedState};
pub use error::{Error, Result};
pub use gate::{apply_gate, Gate};
pub use map::{direct_step, evolve, map_step, GateProgram, MapParams, NoiseModel, NoiseStream, QuantumMap};
pub use qft::qft;
pub use scalar::{Cplx, Real};
pub use state::StateVector;

pub type StateVectorF64 = StateVector<f64>;
pub type StateVectorF32 = StateVector<f32>;
pub type MapParamsF64 = MapParams<f64>;
pub type MapParamsF32 = MapParams<f32>;
pub type NoiseModelF64 = NoiseModel<f64>;
pub type NoiseModelF32 = NoiseModel<f32>;
pub type TimeSeriesF64 = TimeSeries<f64>;
pub type TimeSeriesF32 = TimeSeries<f32>;
pub type ReducedStateF64 = ReducedState<f64>;
pub type GateF64 = Gate<f64>;
