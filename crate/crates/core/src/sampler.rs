//! Numeric moment matrices and tolerance clustering of their entries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

use crate::algebra::{LevelSpec, Monomial, Scenario};
use crate::error::{invalid, Result};
use crate::linalg::{self, CMatrix};
use crate::partition::EqualityPartition;
use crate::quantum::Realization;

/// `Γ[k1][k2] = Tr(ρ S_k1† S_k2)` together with its basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    basis: Vec<Monomial>,
    values: CMatrix,
}

impl MomentMatrix {
    pub fn new(basis: Vec<Monomial>, values: CMatrix) -> Result<Self> {
        if values.nrows() != basis.len() || values.ncols() != basis.len() {
            return Err(invalid(format!(
                "moment matrix is {}x{} but basis has {} elements",
                values.nrows(),
                values.ncols(),
                basis.len()
            )));
        }
        Ok(MomentMatrix { basis, values })
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[(row, col)]
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.values)
    }

    /// `|Γ[0][0] - 1|`.
    pub fn unit_error(&self) -> f64 {
        (self.values[(0, 0)] - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.values)
    }
}

/// Evaluates the moment matrix of `basis` on a realization.
///
/// With `ρ = W W†`, each basis operator is mapped to `T_k = M(S_k) W` and
/// `Γ[k1][k2] = Σ conj(T_k1) ∘ T_k2`, computed as two real Gram products.
pub fn build_moment_matrix(real: &Realization, basis: &[Monomial]) -> Result<MomentMatrix> {
    if basis.is_empty() {
        return Err(invalid("basis is empty"));
    }
    let scenario = real.scenario();
    for m in basis {
        if let Some(s) = m.symbols().iter().find(|&&s| !scenario.contains(s)) {
            return Err(invalid(format!("symbol {s} is outside the scenario")));
        }
    }
    let w = real.state().factor();
    let dim = w.nrows();
    let width = dim * dim;
    let image = |m: &Monomial| -> CMatrix {
        if m.is_zero() {
            CMatrix::zeros(dim, dim)
        } else {
            real.operator(m.symbols()) * &w
        }
    };
    #[cfg(feature = "std")]
    let images: Vec<CMatrix> = {
        use rayon::prelude::*;
        basis.par_iter().map(image).collect()
    };
    #[cfg(not(feature = "std"))]
    let images: Vec<CMatrix> = basis.iter().map(image).collect();

    let n = basis.len();
    let mut re = DMatrix::<f64>::zeros(n, width);
    let mut im = DMatrix::<f64>::zeros(n, width);
    for (k, t) in images.iter().enumerate() {
        for (c, z) in t.iter().enumerate() {
            re[(k, c)] = z.re;
            im[(k, c)] = z.im;
        }
    }
    let re_t = re.transpose();
    let im_t = im.transpose();
    let real_part = &re * &re_t + &im * &im_t;
    let imag_part = &re * &im_t - &im * &re_t;
    let values = CMatrix::from_fn(n, n, |i, j| Complex64::new(real_part[(i, j)], imag_part[(i, j)]));
    MomentMatrix::new(basis.to_vec(), values)
}

const ZERO_LABEL: u32 = u32::MAX;

/// Per-matrix cell labels: `ZERO_LABEL` for vanishing cells, otherwise a
/// union-find root shared by cells connected through chains of pairs whose
/// real and imaginary parts both agree within `tol_eq`.
///
/// Cells are hashed into a grid of `tol_eq`-sized squares; cells sharing a
/// square are joined outright and neighbouring squares are joined when some
/// pair across them agrees.
fn cluster_cells(m: &MomentMatrix, tol_eq: f64, tol_zero: f64) -> Vec<u32> {
    let n = m.size();
    let cells: Vec<Complex64> = (0..n * n).map(|c| m.get(c / n, c % n)).collect();
    let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (c, z) in cells.iter().enumerate() {
        if z.norm() > tol_zero {
            let key = (libm::floor(z.re / tol_eq) as i64, libm::floor(z.im / tol_eq) as i64);
            grid.entry(key).or_default().push(c);
        }
    }
    let mut uf = UnionFind::<usize>::new(cells.len());
    for members in grid.values() {
        for &c in &members[1..] {
            uf.union(members[0], c);
        }
    }
    let close =
        |a: usize, b: usize| (cells[a].re - cells[b].re).abs() <= tol_eq && (cells[a].im - cells[b].im).abs() <= tol_eq;
    for (&(x, y), members) in &grid {
        for (dx, dy) in [(0, 1), (1, -1), (1, 0), (1, 1)] {
            let Some(other) = grid.get(&(x + dx, y + dy)) else { continue };
            if uf.equiv(members[0], other[0]) {
                continue;
            }
            if let Some(&b) = members.iter().find_map(|&a| other.iter().find(|&&b| close(a, b))) {
                uf.union(members[0], b);
            }
        }
    }
    (0..cells.len()).map(|c| if cells[c].norm() > tol_zero { uf.find(c) as u32 } else { ZERO_LABEL }).collect()
}

/// Groups cells that agree (within `tol_eq`) in every matrix; cells with
/// modulus at most `tol_zero` in every matrix form the ZERO class.
///
/// The result is the common refinement of the per-matrix clusterings, further
/// refined so that the transpose of a class is again a single class.
pub fn detect_partition(mats: &[MomentMatrix], tol_eq: f64, tol_zero: f64) -> Result<EqualityPartition> {
    let first = mats.first().ok_or_else(|| invalid("no moment matrices given"))?;
    if !(tol_eq > 0.0 && tol_zero > 0.0) {
        return Err(invalid("tolerances must be positive"));
    }
    if mats.iter().any(|m| m.basis != first.basis) {
        return Err(invalid("moment matrices are indexed by different bases"));
    }
    let n = first.size();
    let labels: Vec<Vec<u32>> = mats.iter().map(|m| cluster_cells(m, tol_eq, tol_zero)).collect();
    let joint: Vec<Vec<u32>> = (0..n * n).map(|c| labels.iter().map(|l| l[c]).collect()).collect();
    let keys: Vec<(&[u32], &[u32])> =
        (0..n * n).map(|c| (joint[c].as_slice(), joint[(c % n) * n + c / n].as_slice())).collect();
    let partition = EqualityPartition::from_cell_keys(n, &keys, |(k, _)| k.iter().all(|&l| l == ZERO_LABEL))?;
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); partition.num_classes()];
    let mut seen = alloc::vec![false; partition.num_classes()];
    for (c, &class) in partition.cells().iter().enumerate() {
        if !seen[class as usize] {
            seen[class as usize] = true;
            values[class as usize] = first.get(c / n, c % n);
        }
    }
    Ok(partition.with_values(values))
}

/// Whether sampling at this rank is predicted to find exactly the algebraic
/// equalities: words shorter than 3, at most two retained projectors per
/// party, or rank above one.
pub fn check_result1(scenario: &Scenario, level: &LevelSpec, rank: usize) -> bool {
    level.max_length() < 3
        || (0..scenario.parties()).all(|p| scenario.settings(p) * (scenario.max_outcomes(p) - 1) < 3)
        || rank > 1
}
