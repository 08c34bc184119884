//! Dense primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector, infeasible start).
//!
//! With `Γ(y) = G0 + Σ y_k G_k` the solved pair is
//!
//! ```text
//! primal:  min  G0 • X   s.t.  -G_k • X = b_k,  X ⪰ 0
//! dual:    max  b · y    s.t.  Z = Γ(y) ⪰ 0
//! ```
//!
//! so the dual is the moment problem and the primal certifies its bound.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::problem::SdpProblem;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Absolute tolerance on `|primal - dual|`.
    pub gap_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iter: 200, gap_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

impl core::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::MaxIterations => "max-iterations",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Upper bound from the primal certificate `X`, objective constant included.
    pub primal_value: f64,
    /// Objective at the moment-matrix point `y`.
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Final `y`.
    pub solution: Vec<f64>,
}

pub const MAX_MATRIX_SIZE: usize = 200;
pub const MAX_VARIABLES: usize = 5000;

/// Relative primal and dual infeasibility accepted at termination.
const FEAS_TOL: f64 = 1e-8;
/// Iterations without a better iterate before giving up.
const STALL_LIMIT: usize = 15;
const STEP_FRACTION: f64 = 0.95;
const DIVERGENCE: f64 = 1e12;

/// Symmetric sparse matrix as its full list of nonzeros.
type Sparse = Vec<(usize, usize, f64)>;

fn dot_sparse(a: &Sparse, x: &DMatrix<f64>) -> f64 {
    a.iter().map(|&(p, q, v)| v * x[(p, q)]).sum()
}

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest `α` with `X + α ΔX ⪰ 0`, or infinity.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let l = Cholesky::new(x.clone())?.unpack();
    let linv = l.solve_lower_triangular(&DMatrix::identity(x.nrows(), x.nrows()))?;
    let mut s = &linv * dx * linv.transpose();
    symmetrize(&mut s);
    let min = SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Some(if min < 0.0 { -1.0 / min } else { f64::INFINITY })
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch.solve(rhs));
    }
    m.clone().lu().solve(rhs)
}

struct Data {
    n: usize,
    c: DMatrix<f64>,
    a: Vec<Sparse>,
    b: DVector<f64>,
}

impl Data {
    fn new(problem: &SdpProblem) -> Self {
        let n = problem.matrix_size();
        let mut c = DMatrix::zeros(n, n);
        let mut a: Vec<Sparse> = vec![Vec::new(); problem.num_vars()];
        for ((i, j), e) in problem.positions().zip(problem.cells()) {
            c[(i, j)] = e.constant;
            c[(j, i)] = e.constant;
            if let Some((k, coeff)) = e.var {
                a[k].push((i, j, -coeff));
                if i != j {
                    a[k].push((j, i, -coeff));
                }
            }
        }
        let b = DVector::from_column_slice(&problem.objective().coefficients);
        Data { n, c, a, b }
    }

    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| dot_sparse(a, x)))
    }

    fn combine(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (a, &w) in self.a.iter().zip(y.iter()) {
            for &(p, q, v) in a {
                m[(p, q)] += w * v;
            }
        }
        m
    }

    /// Adds the least-norm correction making `A(dx) = target` exact. The
    /// `A_k` have disjoint supports, so `A Aᵀ` is diagonal.
    fn restore_primal(&self, dx: &mut DMatrix<f64>, target: &DVector<f64>) {
        for (k, a) in self.a.iter().enumerate() {
            let norm2: f64 = a.iter().map(|t| t.2 * t.2).sum();
            if norm2 == 0.0 {
                continue;
            }
            let shift = (target[k] - dot_sparse(a, dx)) / norm2;
            for &(p, q, v) in a {
                dx[(p, q)] += shift * v;
            }
        }
    }

    /// `M[k][l] = Tr(A_k Z⁻¹ A_l X)`.
    fn schur(&self, zinv: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
        let v = self.a.len();
        let n = self.n;
        let mut m = DMatrix::zeros(v, v);
        let mut buf = DMatrix::zeros(n, n);
        for (l, al) in self.a.iter().enumerate() {
            // buf[q][p] = (Z⁻¹ A_l X)[q][p]
            buf.fill(0.0);
            for &(r, s, w) in al {
                for p in 0..n {
                    let xs = w * x[(s, p)];
                    if xs == 0.0 {
                        continue;
                    }
                    for q in 0..n {
                        buf[(q, p)] += zinv[(q, r)] * xs;
                    }
                }
            }
            for (k, ak) in self.a.iter().enumerate() {
                m[(k, l)] = ak.iter().map(|&(p, q, w)| w * buf[(q, p)]).sum();
            }
        }
        let mt = m.transpose();
        (m + mt) * 0.5
    }
}

/// Solves the moment problem `max objective(y) s.t. Γ(y) ⪰ 0`.
pub fn solve(problem: &SdpProblem, opts: &SolveOptions) -> Result<SolveReport> {
    let n = problem.matrix_size();
    let v = problem.num_vars();
    if n > MAX_MATRIX_SIZE || v > MAX_VARIABLES {
        return Err(invalid(alloc::format!(
            "problem of size {n} with {v} variables exceeds the solver limits ({MAX_MATRIX_SIZE}, {MAX_VARIABLES})"
        )));
    }
    if opts.max_iter == 0 || opts.gap_tol.is_nan() || opts.gap_tol <= 0.0 {
        return Err(invalid("max_iter and gap_tol must be positive"));
    }
    let data = Data::new(problem);
    let offset = problem.objective().constant;

    let norm_c = data.c.norm();
    let norm_b = data.b.norm();
    let a_norms: Vec<f64> = data.a.iter().map(|a| libm::sqrt(a.iter().map(|t| t.2 * t.2).sum::<f64>())).collect();
    let sqrt_n = libm::sqrt(n as f64);
    let xi = a_norms
        .iter()
        .zip(data.b.iter())
        .map(|(an, bk)| n as f64 * (1.0 + bk.abs()) / (1.0 + an))
        .fold(10f64.max(sqrt_n), f64::max);
    let eta = a_norms.iter().copied().fold(10f64.max(sqrt_n).max(norm_c), f64::max);

    let mut x = DMatrix::identity(n, n) * xi;
    let mut z = DMatrix::identity(n, n) * eta;
    let mut y = DVector::zeros(v);

    let report = |status, x: &DMatrix<f64>, y: &DVector<f64>, it| {
        let p = frobenius_dot(&data.c, x) + offset;
        let d = data.b.dot(y) + offset;
        SolveReport {
            status,
            primal_value: p,
            dual_value: d,
            gap: (p - d).abs(),
            iterations: it,
            solution: y.iter().copied().collect(),
        }
    };

    // best iterate so far, ranked by its worst normalized residual
    let mut best = (f64::INFINITY, x.clone(), y.clone(), 0);
    for it in 0..opts.max_iter {
        let rp = &data.b - data.apply(&x);
        let rd = &data.c - &z - data.combine(&y);
        let pobj = frobenius_dot(&data.c, &x);
        let dobj = data.b.dot(&y);
        let gap = (pobj - dobj).abs();
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = rd.norm() / (1.0 + norm_c);
        if gap <= opts.gap_tol && pinf <= FEAS_TOL && dinf <= FEAS_TOL {
            return Ok(report(SolveStatus::Optimal, &x, &y, it));
        }
        if x.norm() > DIVERGENCE * xi && dinf > FEAS_TOL {
            return Ok(report(SolveStatus::Infeasible, &x, &y, it));
        }
        let merit = (gap / opts.gap_tol).max(pinf / FEAS_TOL).max(dinf / FEAS_TOL);
        if merit < best.0 {
            best = (merit, x.clone(), y.clone(), it);
        } else if it - best.3 > STALL_LIMIT {
            return Ok(report(SolveStatus::MaxIterations, &best.1, &best.2, it));
        }
        let mu = frobenius_dot(&x, &z) / n as f64;

        let zinv = match Cholesky::new(z.clone()) {
            Some(ch) => ch.inverse(),
            None => return Err(Error::Numerical("dual slack lost definiteness".into())),
        };
        let schur = data.schur(&zinv, &x);
        let x_rd_zinv = &x * &rd * &zinv;

        let direction = |r_zinv: &DMatrix<f64>| -> Option<(DVector<f64>, DMatrix<f64>, DMatrix<f64>)> {
            let d = r_zinv - &x_rd_zinv;
            let rhs = &rp - data.apply(&d);
            let dy = solve_spd(&schur, &rhs)?;
            let dz = &rd - data.combine(&dy);
            let mut dx = r_zinv - &x * &dz * &zinv;
            symmetrize(&mut dx);
            data.restore_primal(&mut dx, &rp);
            Some((dy, dx, dz))
        };

        // predictor
        let Some((_, dxa, dza)) = direction(&(-&x)) else {
            return Ok(report(SolveStatus::MaxIterations, &best.1, &best.2, it));
        };
        let ap = max_step(&x, &dxa).unwrap_or(0.0).min(1.0);
        let ad = max_step(&z, &dza).unwrap_or(0.0).min(1.0);
        let mu_aff = frobenius_dot(&(&x + &dxa * ap), &(&z + &dza * ad)) / n as f64;
        let ratio = (mu_aff / mu).clamp(0.0, 1.0);
        let sigma = ratio * ratio * ratio;

        // corrector
        let r_zinv = &zinv * (sigma * mu) - &x - &dxa * &dza * &zinv;
        let Some((dy, dx, dz)) = direction(&r_zinv) else {
            return Ok(report(SolveStatus::MaxIterations, &best.1, &best.2, it));
        };
        let ap = (STEP_FRACTION * max_step(&x, &dx).unwrap_or(0.0)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&z, &dz).unwrap_or(0.0)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            return Ok(report(SolveStatus::MaxIterations, &best.1, &best.2, it));
        }
        x += &dx * ap;
        y += &dy * ad;
        z += &dz * ad;
        symmetrize(&mut x);
        symmetrize(&mut z);
    }
    Ok(report(SolveStatus::MaxIterations, &best.1, &best.2, opts.max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::problem::{CellEntry, Objective};

    fn two_by_two(objective: f64) -> SdpProblem {
        let cells = vec![CellEntry::fixed(1.0), CellEntry::variable(0), CellEntry::fixed(1.0)];
        let obj = Objective { constant: 0.0, coefficients: vec![objective] };
        SdpProblem::from_parts(2, 1, cells, obj, vec![]).unwrap()
    }

    #[test]
    fn smallest_lmi() {
        let r = solve(&two_by_two(1.0), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.dual_value - 1.0).abs() <= 1e-8, "{r:?}");
        assert!((r.primal_value - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn minimizing_side() {
        let r = solve(&two_by_two(-1.0), &SolveOptions::default()).unwrap();
        assert!((r.dual_value - 1.0).abs() <= 1e-8, "{r:?}");
    }

    #[test]
    fn zero_objective() {
        let r = solve(&two_by_two(0.0), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.dual_value.abs() <= 1e-8);
    }

    #[test]
    fn infeasible_lmi() {
        // [[-1, y], [y, 1]] is never PSD
        let cells = vec![CellEntry::fixed(-1.0), CellEntry::variable(0), CellEntry::fixed(1.0)];
        let obj = Objective { constant: 0.0, coefficients: vec![1.0] };
        let p = SdpProblem::from_parts(2, 1, cells, obj, vec![]).unwrap();
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert_ne!(r.status, SolveStatus::Optimal);
    }

    #[test]
    fn guard() {
        let n = MAX_MATRIX_SIZE + 1;
        let cells = vec![CellEntry::fixed(0.0); n * (n + 1) / 2];
        let p = SdpProblem::from_parts(n, 0, cells, Objective::default(), vec![]).unwrap();
        assert!(solve(&p, &SolveOptions::default()).is_err());
    }
}
