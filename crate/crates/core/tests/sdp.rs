use momentpick_core::sdp::{assemble_sdp, class_variables, solve, BellFunctional, SolveOptions, SolveStatus};
use momentpick_core::seed::{derive_seed, SeedRole};
use momentpick_core::{
    algebraic_partition, build_moment_matrix, generate_basis, sample_realization, LevelSpec, Scenario,
};

fn chsh_bound(level: &LevelSpec, f: &BellFunctional) -> f64 {
    let basis = generate_basis(&Scenario::chsh(), level).unwrap();
    let p = algebraic_partition(&basis);
    let prob = assemble_sdp(&p, &basis, f).unwrap();
    let r = solve(&prob, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal, "{level}: {r:?}");
    r.dual_value
}

#[test]
fn tsirelson_at_one_plus_ab() {
    let v = chsh_bound(&LevelSpec::one_plus_ab(), &BellFunctional::chsh_correlator());
    assert!((v - 2.0 * 2f64.sqrt()).abs() <= 1e-4, "{v}");
}

#[test]
fn levels_are_monotone() {
    let f = BellFunctional::chsh_correlator();
    let values: Vec<f64> = ["1", "1+AB", "2", "3"].iter().map(|l| chsh_bound(&l.parse().unwrap(), &f)).collect();
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{values:?}");
    }
}

#[test]
fn scaling_the_functional() {
    let f = BellFunctional::chsh_correlator();
    let level = LevelSpec::one_plus_ab();
    let base = chsh_bound(&level, &f);
    for lambda in [0.5, 3.0] {
        let v = chsh_bound(&level, &f.scaled(lambda));
        assert!((v - lambda * base).abs() <= 1e-6 * (lambda * base).abs(), "{lambda}: {v}");
    }
}

#[test]
fn zero_functional_is_feasible() {
    let f = BellFunctional::new(Scenario::chsh()).unwrap();
    assert!(chsh_bound(&LevelSpec::new(2), &f).abs() <= 1e-8);
}

#[test]
fn sampled_realizations_are_feasible_points() {
    let sc = Scenario::chsh();
    let basis = generate_basis(&sc, &LevelSpec::one_plus_ab()).unwrap();
    let p = algebraic_partition(&basis);
    let f = BellFunctional::chsh_correlator();
    let prob = assemble_sdp(&p, &basis, &f).unwrap();
    let optimum = solve(&prob, &SolveOptions::default()).unwrap().primal_value;
    let vars = class_variables(&prob, &p);
    for seed in 0..50 {
        let real = sample_realization(&sc, 1, derive_seed(seed, SeedRole::Trial(0))).unwrap();
        let m = build_moment_matrix(&real, &basis).unwrap();
        let mut y = vec![0.0; prob.num_vars()];
        for (&class, &k) in &vars {
            let (i, j) = (0..basis.len() * basis.len())
                .map(|c| (c / basis.len(), c % basis.len()))
                .find(|&(i, j)| p.class(i, j) == class)
                .unwrap();
            y[k] = m.get(i, j).re;
        }
        let gamma = prob.matrix_at(&y);
        let min_eig = gamma.symmetric_eigenvalues().min();
        assert!(min_eig >= -1e-9, "seed {seed}: {min_eig}");
        let diff = gamma - m.values().map(|z| z.re);
        assert!(diff.amax() <= 1e-12);
        let value = prob.objective_value(&y);
        assert!(value <= optimum + 1e-7, "seed {seed}: {value} > {optimum}");
    }
}
