use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{Monomial, OperatorSymbol, Scenario};
use crate::error::{invalid, Result};
use crate::partition::EqualityPartition;

/// Setting/outcome indices `(x, y, a, b)`, all 0-based, over full outcome
/// ranges.
pub type BehaviorIndex = (usize, usize, usize, usize);

/// Linear objective `Σ c(x,y,a,b) P(a,b|x,y)` on a two-party scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: BTreeMap<BehaviorIndex, f64>,
}

impl BellFunctional {
    pub fn new(scenario: Scenario) -> Result<Self> {
        if scenario.parties() != 2 {
            return Err(invalid(format!("Bell functionals need two parties, scenario has {}", scenario.parties())));
        }
        Ok(BellFunctional { scenario, coefficients: BTreeMap::new() })
    }

    /// Adds `c` to the coefficient of `P(a,b|x,y)`.
    pub fn add(&mut self, x: usize, y: usize, a: usize, b: usize, c: f64) -> Result<()> {
        let sc = &self.scenario;
        if x >= sc.settings(0) || y >= sc.settings(1) {
            return Err(invalid(format!("setting pair ({x}, {y}) out of range")));
        }
        if a >= sc.outcomes(0, x) || b >= sc.outcomes(1, y) {
            return Err(invalid(format!("outcome pair ({a}, {b}) out of range for settings ({x}, {y})")));
        }
        if !c.is_finite() {
            return Err(invalid("coefficient is not finite"));
        }
        *self.coefficients.entry((x, y, a, b)).or_insert(0.0) += c;
        Ok(())
    }

    /// `<A0 B0> + <A0 B1> + <A1 B0> - <A1 B1>` with `<Ax By> = Σ (-1)^(a+b) P(a,b|x,y)`.
    pub fn chsh_correlator() -> Self {
        let mut f = BellFunctional::new(Scenario::chsh()).expect("two parties");
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let sign = if x == 1 && y == 1 { -1.0 } else { 1.0 };
            for a in 0..2 {
                for b in 0..2 {
                    let parity = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    f.add(x, y, a, b, sign * parity).expect("indices in range");
                }
            }
        }
        f
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &BTreeMap<BehaviorIndex, f64> {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut f = self.clone();
        f.coefficients.values_mut().for_each(|c| *c *= factor);
        f
    }

    /// Value on an explicit behavior.
    pub fn evaluate(&self, p: impl Fn(BehaviorIndex) -> f64) -> f64 {
        self.coefficients.iter().map(|(&k, &c)| c * p(k)).sum()
    }
}

/// `constant + Σ coeff * class_value` over partition class ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AffineForm {
    pub constant: f64,
    pub terms: BTreeMap<u32, f64>,
}

impl AffineForm {
    pub fn constant(c: f64) -> Self {
        AffineForm { constant: c, terms: BTreeMap::new() }
    }

    fn class(p: &EqualityPartition, class: u32) -> Self {
        if Some(class) == p.zero_class() {
            AffineForm::default()
        } else if class == p.unit_class() {
            AffineForm::constant(1.0)
        } else {
            let mut f = AffineForm::default();
            f.terms.insert(class, 1.0);
            f
        }
    }

    /// `self += c * other`, dropping terms that cancel exactly.
    pub fn add_scaled(&mut self, c: f64, other: &AffineForm) {
        self.constant += c * other.constant;
        for (&k, &v) in &other.terms {
            let e = self.terms.entry(k).or_insert(0.0);
            *e += c * v;
            if *e == 0.0 {
                self.terms.remove(&k);
            }
        }
    }

    pub fn evaluate(&self, value: impl Fn(u32) -> f64) -> f64 {
        self.constant + self.terms.iter().map(|(&k, &c)| c * value(k)).sum::<f64>()
    }
}

/// Every `P(a,b|x,y)` as an affine form over the classes of `partition`.
///
/// Retained outcomes read the cell `(A^a_x, B^b_y)`; marginals read the first
/// row; last outcomes follow from completeness.
pub fn behavior_map(
    scenario: &Scenario,
    basis: &[Monomial],
    partition: &EqualityPartition,
) -> Result<BTreeMap<BehaviorIndex, AffineForm>> {
    if scenario.parties() != 2 {
        return Err(invalid("behaviors are defined for two parties"));
    }
    if partition.basis_size() != basis.len() {
        return Err(invalid("partition and basis sizes differ"));
    }
    if !basis.first().is_some_and(Monomial::is_identity) {
        return Err(invalid("basis must start with the identity"));
    }
    let index = |s: OperatorSymbol| -> Result<usize> {
        let m = Monomial::Word(alloc::vec![s]);
        basis.iter().position(|b| *b == m).ok_or_else(|| invalid(format!("basis lacks monomial {m}")))
    };
    let cell = |i: usize, j: usize| AffineForm::class(partition, partition.class(i, j));

    let mut map = BTreeMap::new();
    for x in 0..scenario.settings(0) {
        for y in 0..scenario.settings(1) {
            let (na, nb) = (scenario.outcomes(0, x), scenario.outcomes(1, y));
            let rows: Vec<usize> = (0..na - 1).map(|a| index(OperatorSymbol::new(0, x, a))).collect::<Result<_>>()?;
            let cols: Vec<usize> = (0..nb - 1).map(|b| index(OperatorSymbol::new(1, y, b))).collect::<Result<_>>()?;
            // retained-outcome joint and marginal forms
            let joint = |a: usize, b: usize| cell(rows[a], cols[b]);
            let pa = |a: usize| cell(0, rows[a]);
            let pb = |b: usize| cell(0, cols[b]);
            for a in 0..na {
                for b in 0..nb {
                    let form = match (a + 1 == na, b + 1 == nb) {
                        (false, false) => joint(a, b),
                        (false, true) => {
                            let mut f = pa(a);
                            (0..nb - 1).for_each(|b2| f.add_scaled(-1.0, &joint(a, b2)));
                            f
                        }
                        (true, false) => {
                            let mut f = pb(b);
                            (0..na - 1).for_each(|a2| f.add_scaled(-1.0, &joint(a2, b)));
                            f
                        }
                        (true, true) => {
                            let mut f = AffineForm::constant(1.0);
                            (0..na - 1).for_each(|a2| f.add_scaled(-1.0, &pa(a2)));
                            (0..nb - 1).for_each(|b2| f.add_scaled(-1.0, &pb(b2)));
                            for a2 in 0..na - 1 {
                                (0..nb - 1).for_each(|b2| f.add_scaled(1.0, &joint(a2, b2)));
                            }
                            f
                        }
                    };
                    map.insert((x, y, a, b), form);
                }
            }
        }
    }
    Ok(map)
}
