//! Classical toolkit for compiling real linear systems `Ax = b` into QUBO
//! energy functions and analysing the resulting models.
//!
//! The pipeline has five stages, each in its own module:
//!
//! - [`congruence`] diagonalizes `AᵀA` by matrix congruence (`D = RᵀSR`),
//!   either by symmetric elimination or through a Householder QR of `A`.
//! - [`encoding`] maps real unknowns onto labelled qubits (signed-pair or
//!   offset-binary fixed point) and decodes assignments back.
//! - [`qubo`] expands `‖Ax − b‖² − bᵀb` into an upper-triangular QUBO, either
//!   directly ("vanilla") or in the block-diagonal congruence basis
//!   ("Sylvester"), and reports structural metrics.
//! - [`solver`] finds ground states exhaustively or by simulated annealing and
//!   runs the end-to-end pipeline.
//! - [`topology`] builds Chimera graphs, constructs triangle clique minors and
//!   packs disjoint cliques, and computes qubit capacities.
//!
//! [`io`] holds the on-disk formats used by the command-line front end.

pub mod congruence;
pub mod encoding;
pub mod error;
pub mod io;
pub mod linalg;
pub mod qubo;
pub mod solver;
pub mod topology;

pub use congruence::{diagonalize_congruent, qr_congruence, rank_of, CongruencePair, SymMatrix};
pub use encoding::{Assignment, EncodingKind, EncodingSpec, QubitLabel, QubitRole};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use num_rational::BigRational;
pub use qubo::{
    build_sylvester, build_vanilla, BuildOptions, CouplingGraph, Formulation, LinearSystem,
    QuboModel,
};
pub use solver::{solve_exhaustive, solve_sa, solve_system, SaParams, SampleSet};
pub use topology::{ChimeraGraph, Embedding};
