//! Optimized configuration-interaction (CI) solver for two bosons in one
//! dimension with a contact interaction `g δ(x₂ − x₁)` and an arbitrary
//! even-degree polynomial trap.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! numerics; file formats, configuration and the command line live in the
//! `pairci` companion crate.
//!
//! Pipeline:
//!
//! 1. [`potentials::PotentialSpec`] describes `V(x)`.
//! 2. [`ho_basis`] provides oscillator functions of frequency `Ω` and their
//!    one-body matrix elements.
//! 3. [`hamiltonian`] builds the symmetrized pair basis, the contact
//!    interaction tensor and the truncated Hamiltonian.
//! 4. [`solver`] fixes `Ω` by making the truncated trace stationary and
//!    diagonalizes.
//! 5. [`orbitals`] turns CI coefficients into natural orbitals, occupancies
//!    and densities.
//!
//! [`oracles`] holds independent brute-force grid references used to check
//! the CI route.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod crossover;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod ho_basis;
pub mod linalg;
pub mod optimize;
pub mod oracles;
pub mod orbitals;
pub mod potentials;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{DensityField, Grid, GridWavefunction2D};
pub use hamiltonian::{PairBasis, ProblemSpec};
pub use ho_basis::BasisSet;
pub use orbitals::SchmidtDecomposition;
pub use potentials::PotentialSpec;
pub use solver::{OmegaSearchConfig, SpectrumResult};
