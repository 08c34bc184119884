//! Single-party Monte-Carlo tests of moment equalities between blocks of
//! independent projectors.
//!
//! Each trial draws two simplified blocks over the abstract projectors
//! `P_0 .. P_{mnip-1}`, samples a state and one rank-`r` projector per
//! symbol, and compares `Tr(ρ Π A)` with `Tr(ρ Π B)`. Equal symbols share
//! one matrix, which realizes the forced equivalences between the blocks.

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{example_one_pair, is_homogeneous_pair, Block};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quantum::{sample_density_matrix, sample_projective_measurement};
use crate::seed::{derive_seed, uniform_rng, SeedRole};

/// Rejection attempts allowed per generated pair.
pub const GENERATION_BUDGET: u64 = 1_000_000;

/// Relative equality tolerance used when counting coincidences.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub len1: usize,
    pub len2: usize,
    /// Number of independent projectors available to the blocks.
    pub mnip: usize,
    pub rank: usize,
    pub dim: usize,
    pub runs: usize,
    pub tol: f64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: alloc::string::String| Err(Error::InvalidArgument(m));
        if !(self.len1 >= self.len2 && self.len2 >= 1) {
            return fail(format!("need l1 >= l2 >= 1, got {} and {}", self.len1, self.len2));
        }
        if self.mnip < 2 {
            return fail(format!("mnip must be at least 2, got {}", self.mnip));
        }
        if self.rank == 0 || self.dim < 2 * self.rank {
            return fail(format!("need rank >= 1 and dim >= 2 * rank, got r={} d={}", self.rank, self.dim));
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return fail("tolerance must be positive".into());
        }
        Ok(())
    }
}

/// Two blocks and the positions `(c1, c2)` where they carry the same symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPairSystem {
    block_a: Block,
    block_b: Block,
    forced: Vec<(usize, usize)>,
}

impl BlockPairSystem {
    /// Builds the system for any two blocks, without the generator's checks.
    pub fn from_blocks(block_a: Block, block_b: Block) -> Self {
        let mut forced = Vec::new();
        for (i, a) in block_a.symbols().iter().enumerate() {
            for (j, b) in block_b.symbols().iter().enumerate() {
                if a == b {
                    forced.push((i, j));
                }
            }
        }
        BlockPairSystem { block_a, block_b, forced }
    }

    pub fn block_a(&self) -> &Block {
        &self.block_a
    }

    pub fn block_b(&self) -> &Block {
        &self.block_b
    }

    pub fn forced_equivalences(&self) -> &[(usize, usize)] {
        &self.forced
    }

    fn num_symbols(&self) -> usize {
        self.block_a.symbols().iter().chain(self.block_b.symbols()).map(|s| s.setting + 1).max().unwrap_or(0)
    }
}

/// Uniform simplified sequence: no symbol repeats its predecessor.
fn random_block(rng: &mut impl Rng, len: usize, symbols: usize) -> Vec<usize> {
    let mut seq: Vec<usize> = Vec::with_capacity(len);
    for _ in 0..len {
        let s = match seq.last() {
            None => rng.random_range(0..symbols),
            Some(&prev) => {
                let s = rng.random_range(0..symbols - 1);
                if s >= prev {
                    s + 1
                } else {
                    s
                }
            }
        };
        seq.push(s);
    }
    seq
}

pub fn generate_block_pair(spec: &ExperimentSpec, seed: u64) -> Result<BlockPairSystem> {
    generate_block_pair_with_budget(spec, seed, GENERATION_BUDGET)
}

/// Draws pairs of simplified blocks until they differ (for equal lengths)
/// and are not homogeneous (for rank 1).
pub fn generate_block_pair_with_budget(spec: &ExperimentSpec, seed: u64, budget: u64) -> Result<BlockPairSystem> {
    spec.validate()?;
    let mut rng = uniform_rng(seed);
    for _ in 0..budget {
        let a = Block::from_indices(&random_block(&mut rng, spec.len1, spec.mnip))?;
        let b = Block::from_indices(&random_block(&mut rng, spec.len2, spec.mnip))?;
        if spec.len1 == spec.len2 && a == b {
            continue;
        }
        if spec.rank == 1 && is_homogeneous_pair(&a, &b) {
            continue;
        }
        return Ok(BlockPairSystem::from_blocks(a, b));
    }
    Err(Error::InfeasibleSpec(format!(
        "no admissible block pair for l1={} l2={} mnip={} r={} within {budget} attempts",
        spec.len1, spec.len2, spec.mnip, spec.rank
    )))
}

/// `(Tr(ρ Π A), Tr(ρ Π B))` for a state and projectors drawn from `trial_seed`.
pub fn evaluate_pair(
    system: &BlockPairSystem,
    rank: usize,
    dim: usize,
    trial_seed: u64,
) -> Result<(Complex64, Complex64)> {
    let rho = sample_density_matrix(dim, derive_seed(trial_seed, SeedRole::State))?;
    let projectors = (0..system.num_symbols())
        .map(|i| {
            let seed = derive_seed(trial_seed, SeedRole::Symbol(i as u32));
            let set = sample_projective_measurement(dim, rank, 2, seed)?;
            Ok(set.projector(0).clone())
        })
        .collect::<Result<Vec<CMatrix>>>()?;
    let moment = |block: &Block| {
        let mut op = rho.matrix().clone();
        for s in block.symbols() {
            op *= &projectors[s.setting];
        }
        linalg::trace(&op)
    };
    Ok((moment(&system.block_a), moment(&system.block_b)))
}

/// `|e1 - e2| / max(|e1|, |e2|)`, zero when both vanish.
pub fn relative_difference(e1: Complex64, e2: Complex64) -> f64 {
    let scale = e1.norm().max(e2.norm());
    if scale == 0.0 {
        0.0
    } else {
        (e1 - e2).norm() / scale
    }
}

/// Trial outcomes. A trial counts as an equality when its relative
/// difference is at most the tolerance; moments of long blocks can be tiny,
/// so an absolute threshold would also flag pairs that are merely both
/// small. The absolute count is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentReport {
    pub runs_done: usize,
    pub equalities_found: usize,
    /// Trials with `|e1 - e2| <= tol`.
    pub absolute_equalities: usize,
    /// Smallest `|e1 - e2|` over all trials.
    pub min_abs_difference: f64,
    /// Smallest [`relative_difference`] over all trials.
    pub min_rel_difference: f64,
    /// Zero without the `std` feature.
    pub wall_time: Duration,
}

#[derive(Clone, Copy)]
struct Tally {
    runs: usize,
    equal: usize,
    abs_equal: usize,
    min_abs: f64,
    min_rel: f64,
}

impl Tally {
    const EMPTY: Tally = Tally { runs: 0, equal: 0, abs_equal: 0, min_abs: f64::INFINITY, min_rel: f64::INFINITY };

    fn merge(self, o: Tally) -> Tally {
        Tally {
            runs: self.runs + o.runs,
            equal: self.equal + o.equal,
            abs_equal: self.abs_equal + o.abs_equal,
            min_abs: self.min_abs.min(o.min_abs),
            min_rel: self.min_rel.min(o.min_rel),
        }
    }
}

fn run_parallel(
    runs: usize,
    trial: impl Fn(u32) -> Result<(Complex64, Complex64)> + Sync,
    tol: f64,
) -> Result<ExperimentReport> {
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();
    let one = |t: usize| -> Result<Tally> {
        let (e1, e2) = trial(t as u32)?;
        let abs = (e1 - e2).norm();
        let rel = relative_difference(e1, e2);
        Ok(Tally {
            runs: 1,
            equal: usize::from(rel <= tol),
            abs_equal: usize::from(abs <= tol),
            min_abs: abs,
            min_rel: rel,
        })
    };
    #[cfg(feature = "std")]
    let tally = {
        use rayon::prelude::*;
        (0..runs).into_par_iter().map(one).try_reduce(|| Tally::EMPTY, |a, b| Ok(a.merge(b)))?
    };
    #[cfg(not(feature = "std"))]
    let tally = (0..runs).try_fold(Tally::EMPTY, |acc, t| one(t).map(|x| acc.merge(x)))?;
    #[cfg(feature = "std")]
    let wall_time = start.elapsed();
    #[cfg(not(feature = "std"))]
    let wall_time = Duration::ZERO;
    Ok(ExperimentReport {
        runs_done: tally.runs,
        equalities_found: tally.equal,
        absolute_equalities: tally.abs_equal,
        min_abs_difference: tally.min_abs,
        min_rel_difference: tally.min_rel,
        wall_time,
    })
}

/// Runs `spec.runs` trials, each drawing a fresh block-pair system and a
/// fresh realization from a per-trial seed.
pub fn run_trials(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    run_parallel(
        spec.runs,
        |t| {
            let ts = derive_seed(spec.seed, SeedRole::Trial(t));
            let system = generate_block_pair(spec, derive_seed(ts, SeedRole::Blocks))?;
            evaluate_pair(&system, spec.rank, spec.dim, ts)
        },
        spec.tol,
    )
}

/// Runs `spec.runs` trials on one fixed system; lengths and mnip in `spec`
/// are ignored.
pub fn run_trials_on(system: &BlockPairSystem, spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.rank == 0 || spec.dim < spec.rank * 2 || spec.runs == 0 {
        return Err(Error::InvalidArgument("need rank >= 1, dim >= 2 * rank and runs >= 1".into()));
    }
    run_parallel(
        spec.runs,
        |t| evaluate_pair(system, spec.rank, spec.dim, derive_seed(spec.seed, SeedRole::Trial(t))),
        spec.tol,
    )
}

/// Tolerance for the homogeneous positive control.
pub const HOMOGENEOUS_TOL: f64 = 1e-9;

/// Rank-1 trials on the two length-5 homogeneous blocks `P0 P1 P0 P2 P0` and
/// `P0 P2 P0 P1 P0`, counting agreements within [`HOMOGENEOUS_TOL`].
pub fn verify_homogeneous_equality(trials: usize, dim: usize, seed: u64) -> Result<ExperimentReport> {
    let (a, b) = example_one_pair();
    let spec = ExperimentSpec { len1: 5, len2: 5, mnip: 3, rank: 1, dim, runs: trials, tol: HOMOGENEOUS_TOL, seed };
    run_trials_on(&BlockPairSystem::from_blocks(a, b), &spec)
}
