//! Scalars and the small dense linear-algebra kernel.

pub mod complex;
pub mod eigen;
pub mod fit;
pub mod matrix;
pub mod qr;
pub mod real;
pub mod svd;

pub use complex::{CMatrix, Complex};
pub use eigen::{eig_dense, inverse_iteration, EigenDecomposition, EigenPair};
pub use fit::{linear_fit, LinearFit};
pub use matrix::{dot, matvec, norm_inf_vec, vecmat, DenseMatrix};
pub use qr::{thin_lq, thin_qr};
pub use real::{check_context, check_precision, BigFloat, PrecisionContext, Real};
pub use svd::{svd, svd_truncate, Svd};
