//! Haar-random states, rank-`r` projective measurements and full
//! multi-party realizations.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::algebra::{OperatorSymbol, Scenario};
use crate::error::{invalid, Result};
use crate::linalg::{self, CMatrix};
use crate::seed::{derive_seed, Gaussian, SeedRole};

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix without checking the invariants.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }

    pub fn trace_error(&self) -> f64 {
        (linalg::trace(&self.matrix) - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// `W` with `rho = W W†`, built from the eigen-decomposition
    /// `rho = sum_k c_k |r_k><r_k|` as `W = [sqrt(c_k) |r_k>]_k`.
    pub fn factor(&self) -> CMatrix {
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        let mut w = vectors;
        for (k, c) in values.iter().enumerate() {
            let s = libm::sqrt(c.max(0.0));
            w.column_mut(k).scale_mut(s);
        }
        w
    }
}

/// Samples `M M† / Tr(M M†)` with `M = R1 + i R2`, `R1` and `R2` filled
/// row-major with standard normals (all of `R1` first, then `R2`).
pub fn sample_density_matrix(dim: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(invalid("density matrix dimension must be at least 1"));
    }
    let mut g = Gaussian::new(seed);
    let re: Vec<f64> = (0..dim * dim).map(|_| g.sample()).collect();
    let im: Vec<f64> = (0..dim * dim).map(|_| g.sample()).collect();
    let m = CMatrix::from_fn(dim, dim, |r, c| Complex64::new(re[r * dim + c], im[r * dim + c]));
    let mut rho = &m * m.adjoint();
    let tr = linalg::trace(&rho).re;
    rho.unscale_mut(tr);
    // exact Hermiticity
    for i in 0..dim {
        rho[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            let v = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    Ok(DensityMatrix { matrix: rho })
}

/// An ordered complete set of mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    dim: usize,
    rank: usize,
    projectors: Vec<CMatrix>,
}

impl ProjectorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn projector(&self, outcome: usize) -> &CMatrix {
        &self.projectors[outcome]
    }

    /// `max_j ||P_j P_j - P_j||_max`
    pub fn idempotency_error(&self) -> f64 {
        self.projectors.iter().map(|p| linalg::max_abs(&(p * p - p))).fold(0.0, f64::max)
    }

    /// `max_{j != k} ||P_j P_k||_max`
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, p) in self.projectors.iter().enumerate() {
            for (k, q) in self.projectors.iter().enumerate() {
                if j != k {
                    worst = worst.max(linalg::max_abs(&(p * q)));
                }
            }
        }
        worst
    }

    /// `||sum_j P_j - I||_max`
    pub fn completeness_error(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for p in &self.projectors {
            sum += p;
        }
        linalg::max_abs(&(sum - linalg::identity(self.dim)))
    }

    /// Numerical rank of each projector (eigenvalues above 1/2).
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| linalg::hermitian_eigen(p).0.iter().filter(|&&v| v > 0.5).count()).collect()
    }
}

/// Splits the eigenbasis of a Haar-random density matrix into `n_outcomes`
/// groups: `rank` vectors for each of the first `n_outcomes - 1` groups and
/// the remaining `dim - rank (n_outcomes - 1)` vectors for the last one.
pub fn sample_projective_measurement(dim: usize, rank: usize, n_outcomes: usize, seed: u64) -> Result<ProjectorSet> {
    if rank == 0 || n_outcomes == 0 {
        return Err(invalid("rank and outcome count must be positive"));
    }
    if dim < rank * n_outcomes {
        return Err(invalid(format!("dimension {dim} cannot hold {n_outcomes} projectors of rank {rank}")));
    }
    let sigma = sample_density_matrix(dim, seed)?;
    let (_, basis) = linalg::hermitian_eigen(sigma.matrix());
    let projectors = (0..n_outcomes)
        .map(|j| {
            let start = j * rank;
            let end = if j + 1 == n_outcomes { dim } else { start + rank };
            let cols = basis.columns(start, end - start);
            cols * cols.adjoint()
        })
        .collect();
    Ok(ProjectorSet { dim, rank, projectors })
}

/// A sampled state plus one projector set per (party, setting).
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    scenario: Scenario,
    rank: usize,
    local_dims: Vec<usize>,
    state: DensityMatrix,
    measurements: Vec<Vec<ProjectorSet>>,
}

impl Realization {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn measurement(&self, party: usize, setting: usize) -> &ProjectorSet {
        &self.measurements[party][setting]
    }

    pub fn projector(&self, s: OperatorSymbol) -> &CMatrix {
        self.measurements[s.party][s.setting].projector(s.outcome)
    }

    /// Ordered product of `symbols` on the space of `party`.
    pub fn local_operator(&self, party: usize, symbols: &[OperatorSymbol]) -> CMatrix {
        let d = self.local_dims[party];
        let mut op = linalg::identity(d);
        for &s in symbols.iter().filter(|s| s.party == party) {
            op *= self.projector(s);
        }
        op
    }

    /// Tensor product over parties of the per-party ordered products.
    pub fn operator(&self, symbols: &[OperatorSymbol]) -> CMatrix {
        let mut op = self.local_operator(0, symbols);
        for party in 1..self.local_dims.len() {
            op = linalg::kron(&op, &self.local_operator(party, symbols));
        }
        op
    }
}

/// Local dimension `r * max_x N(x)` per party, one projector set per
/// (party, setting) and a state on the full tensor product.
pub fn sample_realization(scenario: &Scenario, rank: usize, seed: u64) -> Result<Realization> {
    if rank == 0 {
        return Err(invalid("rank must be at least 1"));
    }
    let local_dims: Vec<usize> = (0..scenario.parties()).map(|p| rank * scenario.max_outcomes(p)).collect();
    let mut measurements = Vec::with_capacity(scenario.parties());
    for (party, &dim) in local_dims.iter().enumerate() {
        let sets = (0..scenario.settings(party))
            .map(|setting| {
                let s = derive_seed(seed, SeedRole::Projector { party, setting });
                sample_projective_measurement(dim, rank, scenario.outcomes(party, setting), s)
            })
            .collect::<Result<Vec<_>>>()?;
        measurements.push(sets);
    }
    let total: usize = local_dims.iter().product();
    let state = sample_density_matrix(total, derive_seed(seed, SeedRole::State))?;
    Ok(Realization { scenario: scenario.clone(), rank, local_dims, state, measurements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_dimensional_state_is_one() {
        for seed in [0, 1, 99] {
            let rho = sample_density_matrix(1, seed).unwrap();
            assert!((rho.matrix()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(sample_density_matrix(0, 1).is_err());
    }

    #[test]
    fn state_is_deterministic() {
        let a = sample_density_matrix(4, 42).unwrap();
        let b = sample_density_matrix(4, 42).unwrap();
        assert!(a
            .matrix()
            .iter()
            .zip(b.matrix().iter())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn state_invariants_dim8() {
        let rho = sample_density_matrix(8, 7).unwrap();
        assert!(rho.hermiticity_error() <= 1e-12);
        assert!(rho.trace_error() <= 1e-12);
        assert!(rho.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn two_rank_two_projectors_in_dim4() {
        let set = sample_projective_measurement(4, 2, 2, 5).unwrap();
        assert_eq!(set.ranks(), [2, 2]);
        assert!(set.completeness_error() <= 1e-10);
    }

    #[test]
    fn rank_one_qutrit_measurement() {
        let set = sample_projective_measurement(3, 1, 3, 11).unwrap();
        assert_eq!(set.ranks(), [1, 1, 1]);
        assert!(set.orthogonality_error() <= 1e-10);
    }

    #[test]
    fn last_projector_absorbs_remainder() {
        let set = sample_projective_measurement(6, 2, 2, 3).unwrap();
        assert_eq!(set.ranks(), [2, 4]);
    }

    #[test]
    fn undersized_dimension_rejected() {
        assert!(sample_projective_measurement(5, 2, 3, 0).is_err());
    }

    #[test]
    fn rank_one_projectors_are_eigenvector_outer_products() {
        let set = sample_projective_measurement(3, 1, 3, 8).unwrap();
        let sigma = sample_density_matrix(3, 8).unwrap();
        let (_, v) = linalg::hermitian_eigen(sigma.matrix());
        for j in 0..3 {
            let col = v.column(j);
            let outer = col * col.adjoint();
            assert!(linalg::max_abs(&(outer - set.projector(j))) < 1e-12);
        }
    }

    #[test]
    fn chsh_realization_dims() {
        let chsh = Scenario::chsh();
        let r2 = sample_realization(&chsh, 2, 1).unwrap();
        assert_eq!(r2.local_dims(), [4, 4]);
        assert_eq!(r2.state().dim(), 16);
        let r1 = sample_realization(&chsh, 1, 1).unwrap();
        assert_eq!(r1.local_dims(), [2, 2]);
        assert_eq!(r1.state().dim(), 4);
    }

    #[test]
    fn three_three_three_three_rank_two() {
        let sc = Scenario::bipartite(3, 3, 3, 3).unwrap();
        let real = sample_realization(&sc, 2, 4).unwrap();
        assert_eq!(real.local_dims(), [6, 6]);
        assert_eq!(real.state().dim(), 36);
        for party in 0..2 {
            for setting in 0..3 {
                let m = real.measurement(party, setting);
                assert_eq!(m.len(), 3);
                assert_eq!(m.dim(), 6);
                assert!(m.completeness_error() <= 1e-10);
            }
        }
    }

    #[test]
    fn realization_is_deterministic() {
        let sc = Scenario::chsh();
        assert_eq!(sample_realization(&sc, 2, 17).unwrap(), sample_realization(&sc, 2, 17).unwrap());
        assert_ne!(sample_realization(&sc, 2, 17).unwrap(), sample_realization(&sc, 2, 18).unwrap());
    }

    #[test]
    fn factor_reproduces_state() {
        let rho = sample_density_matrix(5, 2).unwrap();
        let w = rho.factor();
        assert!(linalg::max_abs(&(&w * w.adjoint() - rho.matrix())) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn projector_sets_satisfy_algebra(seed in any::<u64>(), rank in 1usize..3, n in 2usize..4, extra in 0usize..3) {
            let dim = rank * n + extra;
            let set = sample_projective_measurement(dim, rank, n, seed).unwrap();
            prop_assert!(set.idempotency_error() <= 1e-10);
            prop_assert!(set.orthogonality_error() <= 1e-10);
            prop_assert!(set.completeness_error() <= 1e-10);
            let ranks = set.ranks();
            prop_assert!(ranks[..n - 1].iter().all(|&r| r == rank));
            prop_assert_eq!(ranks[n - 1], dim - rank * (n - 1));
        }
    }
}
