//! Dense linear algebra kernels over real and complex fields: thin QR,
//! a small eigenvalue solver and least squares.

mod eig;
mod lstsq;
mod matrix;
mod qr;
mod scalar;

pub use eig::{small_eigenvalues, MAX_ORDER};
pub use lstsq::least_squares_solve;
pub use matrix::{dot, norm, Matrix};
pub use qr::{qr_orthonormalize, OrthonormalBasis, ORTHO_TOL, RANK_TOL};
pub use scalar::Scalar;
