//! One-dimensional brickwork engine: MPS evolution and an MPS Arnoldi
//! solver for the leading transfer eigenvalues.

pub mod krylov;
pub mod state;
pub mod sweep;
pub mod tebd;

pub use krylov::{krylov_leading_eigs, KrylovConfig, KrylovSpectrum, RitzValue};
pub use state::{MpsConfig, MpsState, SiteTensor};
pub use sweep::{critical_sweep_1d, GateLine, SweepRow, SweepTable};
pub use tebd::{
    apply_layer, apply_period, evolve_1d, rescaled_pair_update, run_layers, tebd_layer, BrickworkSpec, Evolution1d,
    LayerRecord,
};
