//! Scattering algebra for a single vertex of a quantum wire.
//!
//! `n` half-infinite wires meet at one vertex. The vertex is described by a
//! pair of `n × n` matrices `(A, B)` imposing `A ψ(0) + B ψ'(0) = 0`, and the
//! on-shell scattering matrix at energy `E > 0` is
//!
//! ```text
//! S(E) = -(A + i√E B)⁻¹ (A - i√E B)
//! ```
//!
//! The crate covers the forward map, its exact inverse at a fixed energy,
//! propagation of a known S-matrix to other energies, single-line insertion of
//! an auxiliary vertex, recovery of a full complex S-matrix from magnitude-only
//! measurements, and the von Neumann parameterization of the vertex.
//!
//! Units are `ħ = 2m = 1`, so the wave number is `√E` (positive root).

pub mod boundary;
pub mod cli;
pub mod error;
pub mod gates;
pub mod io;
pub mod linalg;
pub mod phase_recovery;
pub mod smatrix;
pub mod star_product;
pub mod von_neumann;

pub use boundary::{BoundaryCondition, ValidationReport};
pub use error::{Error, Result};
pub use linalg::{haar_random_unitary, ComplexMatrix};
pub use num_complex::Complex64;
pub use phase_recovery::{AmplitudeOracle, EntryMethod, PhaseRecoveryReport};
pub use smatrix::{BlockDecomposition, ConsistencyReport, ScatteringMatrix};
pub use star_product::{AuxInsertion, U2Params};
pub use von_neumann::VonNeumannParam;
