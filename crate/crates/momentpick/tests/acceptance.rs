//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use momentpick::cli::{sampled_partition, BUNDLED_SPECS, TABLE1};
use momentpick::formats::{parse_experiment_spec, ExperimentMode};
use momentpick::sdpa::{read_sdpa, write_sdpa};
use momentpick_core::algebra::example_one_pair;
use momentpick_core::experiments::{run_trials, verify_homogeneous_equality};
use momentpick_core::sdp::{assemble_sdp, solve, BellFunctional, SolveOptions, SolveStatus};
use momentpick_core::seed::{derive_seed, SeedRole};
use momentpick_core::{
    adjoint, algebraic_partition, build_moment_matrix, check_result1, compare_partitions, count_unique,
    enumerate_homogeneous_pairs, generate_basis, product, sample_projective_measurement, sample_realization,
    CountConvention, EqualityPartition, LevelSpec, Monomial, Scenario,
};

const SEEDS: [u64; 3] = [1, 2, 3];
const TOL_EQ: f64 = 1e-9;
const TOL_ZERO: f64 = 1e-9;
const TSIRELSON_TOL: f64 = 1e-4;
const MONOTONE_TOL: f64 = 1e-6;
const PROJECTOR_TOL: f64 = 1e-10;
const MOMENT_TOL: f64 = 1e-10;
const TRIALS: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rows() -> Vec<(Scenario, usize, usize)> {
    TABLE1.iter().map(|&((x, y, a, b), alg, r1)| (Scenario::bipartite(x, y, a, b).unwrap(), alg, r1)).collect()
}

fn sampled(sc: &Scenario, basis: &[Monomial], rank: usize, seed: u64) -> EqualityPartition {
    sampled_partition(sc, basis, rank, 2, seed, TOL_EQ, TOL_ZERO).unwrap()
}

fn level3(sc: &Scenario) -> Vec<Monomial> {
    generate_basis(sc, &LevelSpec::new(3)).unwrap()
}

fn algebraic_counts() -> Outcome {
    let mut bad = Vec::new();
    for (sc, expected, _) in rows() {
        let got = count_unique(&algebraic_partition(&level3(&sc)), CountConvention::ConjugateMerged);
        if got != expected {
            bad.push(format!("{sc:?}: {got} != {expected}"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "10/10 rows exact".into() } else { bad.join("; ") })
}

fn rank_two_sampling() -> Outcome {
    let mut bad = Vec::new();
    for (sc, expected, _) in rows() {
        let basis = level3(&sc);
        let alg = algebraic_partition(&basis);
        for seed in SEEDS {
            let p = sampled(&sc, &basis, 2, seed);
            let r = compare_partitions(&p, &alg).unwrap();
            let got = count_unique(&p, CountConvention::ConjugateMerged);
            if got != expected || !r.merges.is_empty() || !r.splits.is_empty() {
                bad.push(format!(
                    "{:?} seed {seed}: {got} (merges {}, splits {})",
                    sc.outcome_table(),
                    r.merges.len(),
                    r.splits.len()
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { "10 rows x 3 seeds identical to algebraic".into() } else { bad.join("; ") },
    )
}

fn rank_one_sampling() -> Outcome {
    let mut mismatched = Vec::new();
    let mut splits = 0;
    for (sc, _, expected) in rows() {
        let basis = level3(&sc);
        let alg = algebraic_partition(&basis);
        for seed in SEEDS {
            let p = sampled(&sc, &basis, 1, seed);
            splits += compare_partitions(&p, &alg).unwrap().splits.len();
            let got = count_unique(&p, CountConvention::ConjugateMerged);
            if got != expected {
                mismatched.push(format!("expected {expected} got {got}"));
            }
        }
    }
    let runs = mismatched.len();
    mismatched.dedup();
    let detail = format!("splits {splits}; {runs} mismatching runs: {}", mismatched.join(", "));
    outcome(splits == 0 && runs == 0, detail)
}

fn exactness_prediction() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut cases = Vec::new();
    for (sc, _, _) in rows() {
        cases.push((sc.clone(), LevelSpec::new(3), 2));
        cases.push((sc.clone(), LevelSpec::new(3), 1));
        cases.push((sc, LevelSpec::new(2), 1));
    }
    for (sc, level, rank) in cases {
        if !check_result1(&sc, &level, rank) {
            continue;
        }
        let basis = generate_basis(&sc, &level).unwrap();
        let alg = algebraic_partition(&basis);
        for seed in SEEDS {
            checked += 1;
            let r = compare_partitions(&sampled(&sc, &basis, rank, seed), &alg).unwrap();
            if !r.merges.is_empty() {
                bad.push(format!("{:?} level {level} rank {rank} seed {seed}", sc.outcome_table()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} predicted-exact runs, counterexamples: {}", bad.len()))
}

fn homogeneous_enumeration() -> Outcome {
    let start = Instant::now();
    let empty =
        [(4, 2), (4, 3), (4, 4), (5, 2)].iter().all(|&(l, s)| enumerate_homogeneous_pairs(l, s).unwrap().is_empty());
    let (a, b) = example_one_pair();
    let found =
        enumerate_homogeneous_pairs(5, 3).unwrap().iter().any(|(x, y)| (x == &a && y == &b) || (x == &b && y == &a));
    let t = start.elapsed();
    outcome(
        empty && found && t < Duration::from_secs(1),
        format!("short lengths empty: {empty}, example present: {found}, {:.3}s", t.as_secs_f64()),
    )
}

fn bound(level: &str, f: &BellFunctional) -> f64 {
    let basis = generate_basis(&Scenario::chsh(), &level.parse().unwrap()).unwrap();
    let prob = assemble_sdp(&algebraic_partition(&basis), &basis, f).unwrap();
    let r = solve(&prob, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    r.dual_value
}

fn tsirelson() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_momentpick"))
        .args(["solve", "--scenario", "chsh", "--level", "1+AB", "--functional", "chsh"])
        .output()
        .unwrap();
    let t = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let value: f64 =
        text.split_whitespace().find_map(|w| w.strip_prefix("value=")).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
    let f = BellFunctional::chsh_correlator();
    let levels: Vec<f64> = ["1", "1+AB", "2", "3"].iter().map(|l| bound(l, &f)).collect();
    let monotone = levels.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL);
    let close = (value - 2.0 * 2f64.sqrt()).abs() <= TSIRELSON_TOL;
    outcome(
        out.status.success() && close && monotone && t < Duration::from_secs(5),
        format!("value {value:.8} in {:.2}s, levels {levels:.8?}", t.as_secs_f64()),
    )
}

fn experiments() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut rows_run = 0;
    for (name, text) in BUNDLED_SPECS {
        for row in parse_experiment_spec(text).unwrap() {
            let mut spec = row.spec;
            spec.runs = TRIALS;
            rows_run += 1;
            let ok = match row.mode {
                ExperimentMode::Generated => run_trials(&spec).map(|r| r.equalities_found == 0),
                ExperimentMode::Homogeneous => {
                    verify_homogeneous_equality(TRIALS, spec.dim, spec.seed).map(|r| r.equalities_found == TRIALS)
                }
            };
            if !matches!(ok, Ok(true)) {
                bad.push(format!("{name} ({} {} {} {} {})", spec.len1, spec.len2, spec.mnip, spec.rank, spec.dim));
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < Duration::from_secs(300),
        format!("{rows_run} rows x {TRIALS} trials in {:.1}s, failing: {bad:?}", t.as_secs_f64()),
    )
}

fn invariants() -> Outcome {
    let mut worst_proj = 0f64;
    let mut worst_moment = 0f64;
    let sc = Scenario::bipartite(2, 2, 3, 3).unwrap();
    let basis = generate_basis(&sc, &LevelSpec::new(2)).unwrap();
    for seed in 0..100u64 {
        let set = sample_projective_measurement(7, 2, 3, derive_seed(seed, SeedRole::Trial(0))).unwrap();
        worst_proj =
            worst_proj.max(set.idempotency_error()).max(set.orthogonality_error()).max(set.completeness_error());
        let real = sample_realization(&sc, 1 + (seed as usize % 2), seed).unwrap();
        let m = build_moment_matrix(&real, &basis).unwrap();
        worst_moment = worst_moment.max(m.hermiticity_error()).max(m.unit_error()).max(-m.min_eigenvalue());
    }

    let words = generate_basis(&Scenario::chsh(), &LevelSpec::new(2)).unwrap();
    let mut monomials: Vec<Monomial> = words.clone();
    monomials.push(Monomial::Zero);
    let one = Monomial::identity();
    let mut laws = true;
    for a in &monomials {
        laws &= product(a, &one) == *a && product(&one, a) == *a;
        laws &= adjoint(&adjoint(a)) == *a;
        laws &= product(a, &Monomial::Zero) == Monomial::Zero;
        for b in &monomials {
            laws &= adjoint(&product(a, b)) == product(&adjoint(b), &adjoint(a));
            for c in &monomials {
                laws &= product(&product(a, b), c) == product(a, &product(b, c));
            }
        }
    }

    let basis = generate_basis(&Scenario::chsh(), &LevelSpec::one_plus_ab()).unwrap();
    let prob = assemble_sdp(&algebraic_partition(&basis), &basis, &BellFunctional::chsh_correlator()).unwrap();
    let mut buf = Vec::new();
    write_sdpa(&prob, &mut buf).unwrap();
    let round_trip = read_sdpa(buf.as_slice()).map(|p| p == prob).unwrap_or(false);

    outcome(
        worst_proj <= PROJECTOR_TOL && worst_moment <= MOMENT_TOL && laws && round_trip,
        format!(
            "projector err {worst_proj:.1e}, moment err {worst_moment:.1e}, monomial laws {laws}, sdpa round trip {round_trip}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 algebraic counts", algebraic_counts),
        ("2 rank-2 sampling", rank_two_sampling),
        ("3 rank-1 sampling", rank_one_sampling),
        ("4 exactness prediction", exactness_prediction),
        ("5 homogeneous pair enumeration", homogeneous_enumeration),
        ("6 tsirelson bound", tsirelson),
        ("7 block-pair experiments", experiments),
        ("8 invariant suites", invariants),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
