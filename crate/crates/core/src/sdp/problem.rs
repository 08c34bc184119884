use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::functional::{behavior_map, AffineForm, BellFunctional};
use crate::algebra::Monomial;
use crate::error::{invalid, Result};
use crate::partition::EqualityPartition;

/// Content of one upper-triangle cell: `constant + coefficient * y[var]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellEntry {
    pub constant: f64,
    pub var: Option<(usize, f64)>,
}

impl CellEntry {
    pub const fn fixed(constant: f64) -> Self {
        CellEntry { constant, var: None }
    }

    pub const fn variable(index: usize) -> Self {
        CellEntry { constant: 0.0, var: Some((index, 1.0)) }
    }
}

/// `constant + Σ coefficients[k] y[k]`, to be maximized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub constant: f64,
    pub coefficients: Vec<f64>,
}

/// Maximize a linear objective over `y` subject to the real symmetric
/// moment matrix `Γ(y) ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    matrix_size: usize,
    num_vars: usize,
    cells: Vec<CellEntry>,
    objective: Objective,
    labels: Vec<String>,
}

fn triangle_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SdpProblem {
    /// `cells` lists the upper triangle row by row (`n (n + 1) / 2` entries).
    pub fn from_parts(
        matrix_size: usize,
        num_vars: usize,
        cells: Vec<CellEntry>,
        objective: Objective,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = matrix_size;
        if n == 0 {
            return Err(invalid("matrix size must be positive"));
        }
        if cells.len() != n * (n + 1) / 2 {
            return Err(invalid(format!("expected {} upper-triangle cells, got {}", n * (n + 1) / 2, cells.len())));
        }
        if objective.coefficients.len() != num_vars {
            return Err(invalid("objective length differs from the number of variables"));
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(invalid("one label per basis element expected"));
        }
        if let Some(e) = cells.iter().find(|e| e.var.is_some_and(|(k, _)| k >= num_vars)) {
            return Err(invalid(format!("cell refers to variable {:?} of {num_vars}", e.var)));
        }
        Ok(SdpProblem { matrix_size, num_vars, cells, objective, labels })
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn cells(&self) -> &[CellEntry] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> CellEntry {
        self.cells[triangle_index(self.matrix_size, i, j)]
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Upper-triangle `(i, j)` positions in storage order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.matrix_size;
        (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
    }

    /// `Γ(y)`.
    pub fn matrix_at(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.matrix_size;
        let mut m = DMatrix::zeros(n, n);
        for ((i, j), e) in self.positions().zip(&self.cells) {
            let v = e.constant + e.var.map_or(0.0, |(k, c)| c * y[k]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.constant + self.objective.coefficients.iter().zip(y).map(|(c, v)| c * v).sum::<f64>()
    }

    /// First upper-triangle cell carrying each variable.
    pub fn variable_cells(&self) -> Vec<(usize, usize)> {
        let mut out = vec![None; self.num_vars];
        for ((i, j), e) in self.positions().zip(&self.cells) {
            if let Some((k, _)) = e.var {
                out[k].get_or_insert((i, j));
            }
        }
        out.into_iter().map(|c| c.expect("every variable appears in a cell")).collect()
    }
}

/// Sampled classes whose representative value has real part below this and a
/// larger imaginary part are treated as purely imaginary.
const IMAGINARY_TOL: f64 = 1e-9;

/// Real relaxation: each free class, merged with its conjugate, becomes one
/// real variable. UNIT is 1, ZERO is 0, purely imaginary sampled classes are 0.
pub fn assemble_sdp(
    partition: &EqualityPartition,
    basis: &[Monomial],
    functional: &BellFunctional,
) -> Result<SdpProblem> {
    let forms = behavior_map(functional.scenario(), basis, partition)?;
    let classes = partition.num_classes() as u32;
    let imaginary = |c: u32| {
        partition.values().is_some_and(|v| {
            let z = v[c as usize];
            z.re.abs() <= IMAGINARY_TOL && z.im.abs() > IMAGINARY_TOL
        })
    };
    // class -> variable, or the constant it is pinned to
    let mut slot: Vec<core::result::Result<usize, f64>> = vec![Ok(0); classes as usize];
    let mut num_vars = 0;
    for c in 0..classes {
        let conj = partition.conjugate(c);
        slot[c as usize] = if Some(c) == partition.zero_class() || imaginary(c) {
            Err(0.0)
        } else if c == partition.unit_class() {
            Err(1.0)
        } else if conj < c {
            slot[conj as usize]
        } else {
            num_vars += 1;
            Ok(num_vars - 1)
        };
    }
    let n = basis.len();
    let cells = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| match slot[partition.class(i, j) as usize] {
            Ok(k) => CellEntry::variable(k),
            Err(v) => CellEntry::fixed(v),
        })
        .collect();

    let mut total = AffineForm::default();
    for (key, &c) in functional.coefficients() {
        total.add_scaled(c, &forms[key]);
    }
    let mut objective = Objective { constant: total.constant, coefficients: vec![0.0; num_vars] };
    for (&class, &c) in &total.terms {
        match slot[class as usize] {
            Ok(k) => objective.coefficients[k] += c,
            Err(v) => objective.constant += c * v,
        }
    }
    let labels = basis.iter().map(|m| m.to_string()).collect();
    SdpProblem::from_parts(n, num_vars, cells, objective, labels)
}

/// Map from class id to SDP variable, for partitions assembled by
/// [`assemble_sdp`].
pub fn class_variables(problem: &SdpProblem, partition: &EqualityPartition) -> BTreeMap<u32, usize> {
    problem
        .positions()
        .zip(problem.cells())
        .filter_map(|((i, j), e)| e.var.map(|(k, _)| (partition.class(i, j), k)))
        .collect()
}
