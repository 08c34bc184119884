//! Symbolic layer: scenarios, the reduced operator alphabet, monomials under
//! projector algebra, block decomposition and the algebraic equality oracle.

mod basis;
mod blocks;
mod monomial;
mod oracle;
mod scenario;

pub use basis::{generate_basis, LevelSpec};
pub use blocks::{
    abstract_symbol, blocks_of, enumerate_homogeneous_pairs, example_one_pair, is_homogeneous_pair, Block,
};
pub use monomial::{adjoint, canonicalize, product, Monomial, OperatorSymbol};
pub use oracle::{algebraic_partition, product_table};
pub use scenario::{reduced_alphabet, Scenario};
