//! The configuration-space statistical model: site basis, update matrices,
//! observable covectors, the brute-force dense oracle and spectral
//! couplings.

pub mod dense;
pub mod params;
pub mod spectrum;
pub mod trace;

pub use dense::{dense_layer, DenseState, ORACLE_LIMIT};
pub use params::{
    initial_site_weights, observables_from_sectors, single_site_n, two_site_m, ModelParams, ObservableKind,
    Observables,
};
pub use spectrum::{
    dense_spectrum_and_couplings, spectrum_and_couplings, CouplingConstants, SectorLabel, SpectralEntry,
    SpectralProblem, SpectrumResult,
};
