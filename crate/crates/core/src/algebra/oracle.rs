use alloc::vec::Vec;

use super::{adjoint, product, Monomial};
use crate::partition::EqualityPartition;

/// `product(adjoint(basis[i]), basis[j])` for every cell, row-major.
pub fn product_table(basis: &[Monomial]) -> Vec<Monomial> {
    let adjoints: Vec<Monomial> = basis.iter().map(adjoint).collect();
    let mut table = Vec::with_capacity(basis.len() * basis.len());
    for row in &adjoints {
        for col in basis {
            table.push(product(row, col));
        }
    }
    table
}

/// Cells share a class exactly when their operator products coincide as
/// canonical monomials; vanishing products form the ZERO class.
pub fn algebraic_partition(basis: &[Monomial]) -> EqualityPartition {
    let table = product_table(basis);
    EqualityPartition::from_cell_keys(basis.len(), &table, Monomial::is_zero)
        .expect("the adjoint of a cell product is the product of the transposed cell")
}
