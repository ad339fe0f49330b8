//! Qubit dynamical maps generated by U(1)-symmetric unitaries.
//!
//! Sites are 0-based with site 0 the leftmost tensor factor (most significant bit).
//! Single-qubit states use `ρ = (I + a·σ)/2`, maps act as `a' = τ + T a`.

pub mod affine;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod pauli;
pub mod state;
pub mod thermo;
pub mod tolerance;
pub mod u1;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use affine::{AffineMap, MapClassification};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use pauli::{Pauli, PauliDecomposition, PauliString};
pub use state::{BlochVector, CorrelationMatrix};
pub use u1::{HamiltonianSpec, U1Unitary};
