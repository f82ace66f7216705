//! Bulk topological invariants of one-dimensional non-Hermitian
//! nearest-neighbour chains from the zero-energy reflection matrix.

pub mod beta;
pub mod error;
pub mod greens;
pub mod invariants;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::Real;
pub use model::zoo::SymmetricModel;
pub use model::{BoundaryCondition, LatticeModel, SymmetrySet};

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type PolyCoeffs64 = linalg::PolyCoeffs<f64>;
pub type PolyCoeffs32 = linalg::PolyCoeffs<f32>;
pub type LatticeModel64 = model::LatticeModel<f64>;
pub type LatticeModel32 = model::LatticeModel<f32>;
pub type SymmetrySet64 = model::SymmetrySet<f64>;
pub type SymmetrySet32 = model::SymmetrySet<f32>;
pub type SymmetricModel64 = model::zoo::SymmetricModel<f64>;
pub type SymmetricModel32 = model::zoo::SymmetricModel<f32>;
