use std::sync::Arc;

use mrz_core::filtration::relative_sup_error;
use mrz_core::inequality::{nonsing_gap, reduce_to_nonsingular, InstanceGenerator};
use mrz_core::rng;
use mrz_core::{conj_riesz, decompose, duality_gap, riesz, FiltrationTree, MartingaleProcess, RandomVariable};
use proptest::prelude::*;

const EXACT: f64 = 1e-12;

fn random_variable(seed: u64, depth: usize, branch_max: usize) -> RandomVariable {
    let mut rng = rng::stream(seed, 0);
    let tree = Arc::new(FiltrationTree::random(&mut rng, depth, branch_max));
    let values = (0..tree.leaf_count()).map(|_| rng::normal(&mut rng)).collect();
    RandomVariable::new(tree, depth, values).unwrap()
}

fn partner(f: &RandomVariable, seed: u64) -> RandomVariable {
    let mut rng = rng::stream(seed, 1);
    let values = f.values().iter().map(|_| rng::normal(&mut rng)).collect();
    RandomVariable::new(f.tree().clone(), f.level(), values).unwrap()
}

/// Relative sup distance after lifting both to the deeper level.
fn distance(a: &RandomVariable, b: &RandomVariable) -> f64 {
    let level = a.level().max(b.level());
    relative_sup_error(a.lift(level).unwrap().values(), b.lift(level).unwrap().values())
}

/// `Σ_{n=1}^{N} (E_n − E_{n−1}) M_n F_n`, term by term from the primitives.
fn naive_conj(f: &RandomVariable, alpha: f64, n_terms: usize) -> RandomVariable {
    let mut total = RandomVariable::zeros(f.tree().clone(), n_terms).unwrap();
    for n in 1..=n_terms {
        let weighted = f.condition(n).unwrap().multiply(n, alpha).unwrap();
        let term = weighted.condition(n).unwrap().sub(&weighted.condition(n - 1).unwrap()).unwrap();
        total = total.add(&term).unwrap();
    }
    total
}

/// `Σ_{n=1}^{N} M_n (E_n − E_{n−1}) f`, term by term from the primitives.
fn naive_riesz(f: &RandomVariable, alpha: f64, n_terms: usize) -> RandomVariable {
    let mut total = RandomVariable::zeros(f.tree().clone(), n_terms).unwrap();
    for n in 1..=n_terms {
        let diff = f.condition(n).unwrap().sub(&f.condition(n - 1).unwrap()).unwrap();
        total = total.add(&diff.multiply(n, alpha).unwrap()).unwrap();
    }
    total
}

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn tower_property(seed in any::<u64>(), depth in 1usize..=5, branch in 1usize..=4) {
        let f = random_variable(seed, depth, branch);
        for k in 0..=depth {
            for n in 0..=depth {
                let twice = f.condition(k).unwrap().condition(n).unwrap();
                let once = f.condition(k.min(n)).unwrap();
                prop_assert!(distance(&twice, &once) <= EXACT);
            }
        }
    }

    #[test]
    fn conditioning_and_multiplication_are_self_adjoint(
        seed in any::<u64>(), depth in 1usize..=5, branch in 1usize..=4, alpha in 0.0f64..1.0,
    ) {
        let f = random_variable(seed, depth, branch);
        let g = partner(&f, seed);
        let scale = f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
        for n in 0..=depth {
            let e = f.condition(n).unwrap().inner(&g).unwrap() - f.inner(&g.condition(n).unwrap()).unwrap();
            prop_assert!(e.abs() <= EXACT * scale);
            let m = f.multiply(n, alpha).unwrap().inner(&g).unwrap() - f.inner(&g.multiply(n, alpha).unwrap()).unwrap();
            prop_assert!(m.abs() <= EXACT * scale);
        }
    }

    #[test]
    fn conditioning_commutes_with_coarser_multiplication(
        seed in any::<u64>(), depth in 1usize..=5, branch in 1usize..=4, alpha in 0.0f64..1.0,
    ) {
        let f = random_variable(seed, depth, branch);
        for n in 0..=depth {
            for k in 0..=n {
                let left = f.multiply(k, alpha).unwrap().condition(n).unwrap();
                let right = f.condition(n).unwrap().multiply(k, alpha).unwrap();
                prop_assert!(distance(&left, &right) <= EXACT);
            }
        }
    }

    #[test]
    fn probabilities_are_conserved(seed in any::<u64>(), depth in 0usize..=6, branch in 1usize..=5) {
        let tree = FiltrationTree::random(&mut rng::stream(seed, 0), depth, branch);
        prop_assert!(tree.conservation_error() <= EXACT);
    }

    #[test]
    fn lp_norm_is_nondecreasing_in_p(seed in any::<u64>(), depth in 1usize..=4, p in 1.0f64..8.0, dp in 0.0f64..4.0) {
        let f = random_variable(seed, depth, 3);
        let lo = f.lp_norm(p).unwrap();
        let hi = f.lp_norm(p + dp).unwrap();
        prop_assert!(lo <= hi * (1.0 + EXACT));
        prop_assert!(hi <= f.sup_norm() * (1.0 + EXACT));
    }

    #[test]
    fn maximal_function_dominates(seed in any::<u64>(), depth in 1usize..=5) {
        let f = random_variable(seed, depth, 3);
        let m = MartingaleProcess::from_terminal(&f);
        let star = m.maximal_function();
        for step in m.steps() {
            let lifted = step.lift(depth).unwrap();
            for (s, v) in star.values().iter().zip(lifted.values()) {
                prop_assert!(*s >= v.abs());
            }
        }
        prop_assert!(m.worst_tower_error().map_or(0.0, |e| e.1) <= EXACT);
    }

    #[test]
    fn duality(seed in any::<u64>(), depth in 1usize..=6, branch in 1usize..=4, alpha in 0.0f64..1.0) {
        let f = random_variable(seed, depth, branch);
        let g = partner(&f, seed);
        let scale = f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
        for n in 0..=depth {
            prop_assert!(duality_gap(&f, &g, alpha, n).unwrap() <= 1e-10 * scale);
        }
    }

    #[test]
    fn operators_match_their_definitions(seed in any::<u64>(), depth in 1usize..=5, branch in 1usize..=4, alpha in 0.0f64..1.0) {
        let f = random_variable(seed, depth, branch);
        let conj = conj_riesz(&f, alpha, depth).unwrap();
        let direct = riesz(&f, alpha, depth).unwrap();
        for n in 0..=depth {
            prop_assert!(distance(&conj.partials[n], &naive_conj(&f, alpha, n)) <= EXACT);
            prop_assert!(distance(&direct.partials[n], &naive_riesz(&f, alpha, n)) <= EXACT);
        }
    }

    #[test]
    fn truncation_identity(seed in any::<u64>(), depth in 1usize..=6, branch in 1usize..=4, alpha in 0.0f64..1.0) {
        let f = random_variable(seed, depth, branch);
        let full = conj_riesz(&f, alpha, depth).unwrap();
        for n in 0..=depth {
            let conditioned = full.value.condition(n).unwrap();
            prop_assert!(distance(&conditioned, &full.partials[n]) <= EXACT);
            let truncated = conj_riesz(&f.condition(n).unwrap(), alpha, n).unwrap().value;
            prop_assert!(distance(&conditioned, &truncated) <= EXACT);
        }
    }

    #[test]
    fn both_operators_are_linear(seed in any::<u64>(), depth in 1usize..=5, alpha in 0.0f64..1.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = random_variable(seed, depth, 3);
        let g = partner(&f, seed);
        let combo = f.scale(a).add(&g.scale(b)).unwrap();
        for op in [riesz, conj_riesz] {
            let left = op(&combo, alpha, depth).unwrap().value;
            let right = op(&f, alpha, depth).unwrap().value.scale(a)
                .add(&op(&g, alpha, depth).unwrap().value.scale(b)).unwrap();
            let scale = op(&f, alpha, depth).unwrap().value.sup_norm() * a.abs()
                + op(&g, alpha, depth).unwrap().value.sup_norm() * b.abs();
            let err = left.sub(&right).unwrap().sup_norm();
            prop_assert!(err <= EXACT * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn decompositions_satisfy_all_conditions(seed in any::<u64>(), depth in 1usize..=5, branch in 1usize..=5, p in 1.1f64..6.0) {
        let f = random_variable(seed, depth, branch);
        let d = decompose(&f, p).unwrap();
        prop_assert!(d.probability_defect() <= 1e-9);
        prop_assert!(d.check_domination().passed());
        prop_assert!(d.check_nonsingularity().passed());
        prop_assert!(d.check_a_bound().passed());
        prop_assert!(d.recombination_error() <= EXACT);
        let h1 = MartingaleProcess::from_terminal(&f).h1_norm();
        prop_assert!((d.y.iter().sum::<f64>() - h1).abs() <= EXACT * h1);
        let report = d.check_b_bound(f64::MAX).unwrap();
        prop_assert!(report.identity_error <= 1e-10);
    }

    #[test]
    fn nonsing_lhs_is_nonnegative(seed in any::<u64>(), index in 0u64..1000, p in 1.05f64..8.0) {
        let inst = InstanceGenerator::new(p, 1.0).instance(seed, index);
        let gap = nonsing_gap(&inst.x, &inst.probs, p).unwrap();
        prop_assert!(gap.lhs >= 0.0);
        prop_assert!(gap.rhs >= 0.0);
    }

    #[test]
    fn reduction_only_lowers_the_top(seed in any::<u64>(), index in 0u64..1000, p in 1.05f64..8.0) {
        let inst = InstanceGenerator::new(p, 1.0).instance(seed, index);
        let out = reduce_to_nonsingular(&inst);
        let changed: Vec<usize> = (0..inst.atoms()).filter(|&j| out.y[j] != inst.y[j]).collect();
        prop_assert!(changed.len() <= 1);
        for j in 0..inst.atoms() {
            prop_assert!(out.y[j] <= inst.y[j]);
            prop_assert!(out.y[j] >= out.x[j]);
        }
        prop_assert_eq!((&out.x, &out.a, &out.probs), (&inst.x, &inst.a, &inst.probs));
    }
}

#[test]
fn potentials_differ_on_skewed_trees() {
    // level 1 splits 1/4 | 3/4; each atom splits again 1/2 | 1/2
    let tree = Arc::new(
        FiltrationTree::new(vec![
            vec![mrz_core::Atom::new(1.0, 0)],
            vec![mrz_core::Atom::new(0.25, 0), mrz_core::Atom::new(0.75, 0)],
            vec![
                mrz_core::Atom::new(0.125, 0),
                mrz_core::Atom::new(0.125, 0),
                mrz_core::Atom::new(0.375, 1),
                mrz_core::Atom::new(0.375, 1),
            ],
        ])
        .unwrap(),
    );
    let f = RandomVariable::new(tree, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let direct = riesz(&f, 0.5, 2).unwrap().value;
    let conj = conj_riesz(&f, 0.5, 2).unwrap().value;
    // on the heavy level-1 atom: I f = M_1 (F_1 − F_0) = (3/4)^{1/2} (0 − 1/8),
    // I' f = −E_0 M_1 F_1 = −(1/4)(1/4)^{1/2}(1/2)
    let heavy_direct = -0.75_f64.sqrt() / 8.0;
    for i in [2, 3] {
        assert!((direct.values()[i] - heavy_direct).abs() < EXACT);
        assert!((conj.values()[i] + 1.0 / 16.0).abs() < EXACT);
    }
    assert!(direct.sub(&conj).unwrap().sup_norm() > 0.04);
}

#[test]
fn constants_are_annihilated() {
    let f = random_variable(5, 4, 3).map(|_| 2.5);
    for alpha in [0.0, 0.3, 0.9] {
        assert!(riesz(&f, alpha, 4).unwrap().value.sup_norm() <= EXACT);
        assert!(duality_gap(&f, &f, alpha, 4).unwrap() <= EXACT);
    }
}

#[test]
fn conjugate_of_one_pairs_with_the_mean_of_riesz() {
    let f = random_variable(17, 4, 3);
    let one = RandomVariable::constant(f.tree().clone(), 0, 1.0).unwrap();
    let left = riesz(&f, 0.4, 4).unwrap().value.expectation();
    let right = f.inner(&conj_riesz(&one, 0.4, 4).unwrap().value).unwrap();
    assert!((left - right).abs() <= 1e-12 * f.lp_norm(2.0).unwrap());
}
