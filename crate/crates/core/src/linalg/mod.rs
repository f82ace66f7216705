//! Dense complex linear algebra: the kernels everything else is built on.

pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod pfaffian;
pub mod poly;
pub mod svd;
pub mod takagi;

pub use eigen::{eig, eigenvalues, Eigen};
pub use lu::{det, inverse, solve, Lu};
pub use matrix::{vdot, vnorm, ComplexMatrix};
pub use pfaffian::pfaffian;
pub use poly::{poly_roots, PolyCoeffs};
pub use svd::{condition_number, rank_tol, Svd};
pub use takagi::takagi_factor;

/// Default relative tolerance for numerical rank.
pub const RANK_REL_TOL: f64 = 1e-8;
