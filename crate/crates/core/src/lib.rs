//! Pattern decomposition and exact diagonalization of the quantum Rabi
//! model `H = a†a + (Δ/2) σ_x + g (a + a†) σ_z`.
//!
//! The Hamiltonian is rewritten as `Σ_n λ_n A_n† A_n` over three pattern
//! operators obtained from a 3×3 operator-space coupling matrix
//! ([`pattern`]). Both forms are assembled on a truncated Fock basis
//! ([`operators`]), diagonalized ([`spectral`]), split into per-pattern
//! observables ([`observables`]) and swept over the coupling
//! ([`sweep`]).

pub mod cli;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod output;
pub mod params;
pub mod pattern;
pub mod spectral;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use observables::{StateObservables, WavefunctionSlice};
pub use operators::{OperatorMatrix, Primitives};
pub use params::ModelParams;
pub use pattern::{CouplingMatrix, PatternBasis, PatternDerivatives};
pub use spectral::EigenSolution;
pub use sweep::{SweepConfig, SweepRecord};
