//! Moment-matrix constraint discovery for NPA-style relaxations of quantum
//! correlations.
//!
//! The crate samples random quantum realizations (Haar-random states and
//! rank-`r` projective measurements), evaluates moment matrices on them and
//! reads off which entries are equal or vanish. The same equality structure
//! is derived symbolically from the projector algebra so the two routes can be
//! cross-checked. Partitions can then be turned into semidefinite programs and
//! solved with a small dense interior-point method.
//!
//! The crate is `no_std` + `alloc`. Enabling the `std` feature turns on rayon
//! parallelism for the Monte-Carlo experiments and wall-clock timing.
//!
//! Module map:
//!
//! - [`quantum`]: random density matrices, projector sets and realizations.
//! - [`algebra`]: scenarios, monomials, bases, blocks and the algebraic
//!   partition.
//! - [`partition`]: [`EqualityPartition`] and counting conventions.
//! - [`sampler`]: numeric moment matrices and tolerance clustering.
//! - [`sdp`]: Bell functionals, SDP assembly and the solver.
//! - [`experiments`]: block-pair Monte-Carlo experiments.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod algebra;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod partition;
pub mod quantum;
pub mod sampler;
pub mod sdp;
pub mod seed;

pub use algebra::{
    adjoint, algebraic_partition, blocks_of, canonicalize, enumerate_homogeneous_pairs, generate_basis,
    is_homogeneous_pair, product, reduced_alphabet, Block, LevelSpec, Monomial, OperatorSymbol, Scenario,
};
pub use error::{Error, Result};
pub use partition::{compare_partitions, count_unique, ComparisonReport, CountConvention, EqualityPartition};
pub use quantum::{
    sample_density_matrix, sample_projective_measurement, sample_realization, DensityMatrix, ProjectorSet, Realization,
};
pub use sampler::{build_moment_matrix, check_result1, detect_partition, MomentMatrix};
