//! Perturbative Hamiltonian gadget constructions with spectral verification.
//!
//! The crate builds ancilla-assisted gadget Hamiltonians whose low-lying
//! spectra reproduce target interactions (subdivision, parallel subdivision,
//! 3-to-2-body in two variants, a fifth-order ZZZ gadget over transverse
//! Ising terms, a YY creation gadget, and a parallel 3-to-2 construction
//! with cross-gadget compensation), evaluates the closed-form penalty-gap
//! bounds for each family, verifies spectral guarantees by exact
//! diagonalization and self-energy analysis, and searches for the minimal
//! gap achieving a requested error.

pub mod dd;
pub mod error;
pub mod gadgets;
pub mod pauli;
pub mod reduction;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
pub use gadgets::{GadgetBuild, TargetSpec};
pub use pauli::{Axis, OperatorSum, PauliString, PauliTerm};
