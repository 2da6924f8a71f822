//! Permutation-symmetric engine: the transfer matrix restricted to
//! Hamming sectors, evolution, spectra and the critical point.

pub mod critical;
pub mod evolve;
pub mod transfer;

pub use critical::{
    critical_point, gap_extrapolation, kink_locator, reduced_spectrum, CriticalMode, GapExtrapolation, KinkResult,
};
pub use evolve::{evolve, ReducedState};
pub use transfer::{reduced_gate_matrix, reduced_noise_matrix, ReducedTransfer};
