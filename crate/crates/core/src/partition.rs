//! Equivalence classes over moment-matrix cells.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Cells of an `N x N` moment matrix grouped into classes of forced-equal
/// entries, with a distinguished ZERO class (if any cell vanishes) and the
/// UNIT class holding cell `(0, 0)`.
///
/// Class ids are canonical: classes are numbered in row-major order of their
/// first cell, so the unit class is always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityPartition {
    basis_size: usize,
    class_of: Vec<u32>,
    num_classes: usize,
    zero_class: Option<u32>,
    unit_class: u32,
    conjugate: Vec<u32>,
    values: Option<Vec<Complex64>>,
}

impl EqualityPartition {
    /// Groups cells by equal keys. `is_zero` marks keys of vanishing cells,
    /// which must all be equal. Conjugate pairing maps the class of `(i, j)`
    /// to the class of `(j, i)`; the keys must be consistent with that.
    pub fn from_cell_keys<K: Ord + Clone>(basis_size: usize, keys: &[K], is_zero: impl Fn(&K) -> bool) -> Result<Self> {
        let n = basis_size;
        if n == 0 || keys.len() != n * n {
            return Err(invalid(format!("expected {} cell keys for basis size {n}", n * n)));
        }
        let mut ids: BTreeMap<&K, u32> = BTreeMap::new();
        let mut class_of = Vec::with_capacity(n * n);
        let mut zero_class = None;
        for key in keys {
            let next = ids.len() as u32;
            let id = *ids.entry(key).or_insert(next);
            if is_zero(key) {
                match zero_class {
                    None => zero_class = Some(id),
                    Some(z) if z != id => return Err(invalid("zero cells carry different keys")),
                    _ => {}
                }
            }
            class_of.push(id);
        }
        let num_classes = ids.len();
        if zero_class == Some(class_of[0]) {
            return Err(invalid("cell (0, 0) cannot be zero"));
        }
        let mut conjugate = vec![u32::MAX; num_classes];
        for i in 0..n {
            for j in 0..n {
                let c = class_of[i * n + j];
                let t = class_of[j * n + i];
                if conjugate[c as usize] == u32::MAX {
                    conjugate[c as usize] = t;
                } else if conjugate[c as usize] != t {
                    return Err(invalid(format!("transposed cells of class {c} fall into several classes")));
                }
            }
        }
        Ok(EqualityPartition {
            basis_size: n,
            class_of,
            num_classes,
            zero_class,
            unit_class: 0,
            conjugate,
            values: None,
        })
    }

    pub(crate) fn with_values(mut self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.num_classes);
        self.values = Some(values);
        self
    }

    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class(&self, row: usize, col: usize) -> u32 {
        self.class_of[row * self.basis_size + col]
    }

    /// Row-major class table.
    pub fn cells(&self) -> &[u32] {
        &self.class_of
    }

    pub fn zero_class(&self) -> Option<u32> {
        self.zero_class
    }

    pub fn unit_class(&self) -> u32 {
        self.unit_class
    }

    pub fn conjugate(&self, class: u32) -> u32 {
        self.conjugate[class as usize]
    }

    pub fn conjugate_pairing(&self) -> &[u32] {
        &self.conjugate
    }

    /// Representative sampled value per class, for sampled partitions.
    pub fn values(&self) -> Option<&[Complex64]> {
        self.values.as_deref()
    }

    /// Number of cells in each class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Checks every structural invariant; returns a description of the
    /// first violation.
    pub fn validate(&self) -> core::result::Result<(), alloc::string::String> {
        let n = self.basis_size;
        if self.class_of.len() != n * n {
            return Err("class table is not total".into());
        }
        if self.class_of[0] != self.unit_class {
            return Err("unit class does not contain (0, 0)".into());
        }
        for i in 0..n {
            for j in 0..n {
                if self.conjugate(self.class(i, j)) != self.class(j, i) {
                    return Err(format!("conjugate pairing broken at ({i}, {j})"));
                }
            }
        }
        for c in self.zero_class.into_iter().chain([self.unit_class]) {
            if self.conjugate(c) != c {
                return Err(format!("class {c} must be self-conjugate"));
            }
        }
        Ok(())
    }
}

/// How distinct entries are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountConvention {
    /// Every class, ZERO and UNIT included.
    AllClasses,
    /// Every class except ZERO.
    NonZero,
    /// Every class except ZERO and UNIT.
    NonZeroNonUnit,
    /// Non-ZERO classes with each class identified with its conjugate, i.e.
    /// distinct entries of the upper triangle up to complex conjugation.
    #[default]
    ConjugateMerged,
}

impl FromStr for CountConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "a" => Ok(CountConvention::AllClasses),
            "nonzero" | "b" => Ok(CountConvention::NonZero),
            "nonzero-nonunit" | "c" => Ok(CountConvention::NonZeroNonUnit),
            "conjugate-merged" | "d" => Ok(CountConvention::ConjugateMerged),
            _ => Err(invalid(format!(
                "unknown count convention {s:?} (all, nonzero, nonzero-nonunit, conjugate-merged)"
            ))),
        }
    }
}

pub fn count_unique(p: &EqualityPartition, convention: CountConvention) -> usize {
    let nonzero = p.num_classes - usize::from(p.zero_class.is_some());
    match convention {
        CountConvention::AllClasses => p.num_classes,
        CountConvention::NonZero => nonzero,
        CountConvention::NonZeroNonUnit => nonzero - 1,
        CountConvention::ConjugateMerged => {
            (0..p.num_classes as u32).filter(|&c| Some(c) != p.zero_class && c <= p.conjugate(c)).count()
        }
    }
}

/// Sampled-versus-algebraic partition comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    /// Counts under the default convention.
    pub classes_sampled: usize,
    pub classes_algebraic: usize,
    /// True when the sampled partition coarsens the algebraic one (no
    /// algebraic class is split).
    pub coarsens: bool,
    /// Pairs of algebraic classes that the sampled partition merges: for
    /// every sampled class, its smallest algebraic class paired with each
    /// other algebraic class it contains.
    pub merges: Vec<(u32, u32)>,
    /// Algebraic classes whose cells land in more than one sampled class.
    pub splits: Vec<u32>,
}

pub fn compare_partitions(sampled: &EqualityPartition, algebraic: &EqualityPartition) -> Result<ComparisonReport> {
    if sampled.basis_size != algebraic.basis_size {
        return Err(invalid(format!(
            "partitions over different bases ({} vs {})",
            sampled.basis_size, algebraic.basis_size
        )));
    }
    let mut by_sampled: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); sampled.num_classes];
    let mut by_algebraic: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); algebraic.num_classes];
    for (&s, &a) in sampled.class_of.iter().zip(&algebraic.class_of) {
        by_sampled[s as usize].insert(a);
        by_algebraic[a as usize].insert(s);
    }
    let mut merges = Vec::new();
    for set in &by_sampled {
        let mut it = set.iter();
        if let Some(&first) = it.next() {
            merges.extend(it.map(|&other| (first, other)));
        }
    }
    let splits: Vec<u32> = (0..algebraic.num_classes as u32).filter(|&a| by_algebraic[a as usize].len() > 1).collect();
    Ok(ComparisonReport {
        classes_sampled: count_unique(sampled, CountConvention::default()),
        classes_algebraic: count_unique(algebraic, CountConvention::default()),
        coarsens: splits.is_empty(),
        merges,
        splits,
    })
}
