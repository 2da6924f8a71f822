pub mod a2a;
pub mod cli;
pub mod error;
pub mod gates;
pub mod model;
pub mod mps;
pub mod noise;
pub mod numerics;

pub use error::{Error, Result};
