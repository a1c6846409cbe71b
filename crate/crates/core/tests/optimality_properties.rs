use std::f64::consts::{FRAC_PI_3, PI};

use gdist_core::fidelity::squeeze_coupling;
use gdist_core::optimality::{condition_residual, gamma_coupling, special_case_residual};
use gdist_core::{
    build_equality_equation, check_condition_general, classify, fidelity_same_mean, minimize_overlap,
    minimize_overlap_scan, solve_equality_phi, solve_s2_for_optimality, GaussianParams, OptimalityClass,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(g: f64, s: f64, t: f64) -> GaussianParams<f64> {
    GaussianParams::new(g, s, t, 0.0, 0.0).unwrap()
}

fn arb_same_mean() -> impl Strategy<Value = GaussianParams<f64>> {
    (prop_oneof![Just(1.0), 1.0f64..6.0], 1.0f64..8.0, 0.0..PI).prop_map(|(g, s, t)| p(g, s, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn analytic_minimum_agrees_with_scan(a in arb_same_mean(), b in arb_same_mean()) {
        let analytic = minimize_overlap(&a, &b);
        let scan = minimize_overlap_scan(&a, &b, 4096);
        prop_assert!((analytic.overlap - scan.overlap).abs() < 1e-8,
            "analytic {} scan {}", analytic.overlap, scan.overlap);
    }

    #[test]
    fn classifier_matches_minimizer(a in arb_same_mean(), b in arb_same_mean()) {
        let v = check_condition_general(&a, &b).unwrap();
        let f = fidelity_same_mean(&a, &b).unwrap().fidelity;
        let scan = minimize_overlap_scan(&a, &b, 4096);
        prop_assert!(v.gap >= -1e-9);
        prop_assert_eq!(v.class.is_optimal(), scan.overlap - f <= 1e-7,
            "class {:?} scan gap {}", v.class, scan.overlap - f);
        prop_assert_eq!(v.witness_phi.is_some(), v.class.is_optimal());
        if v.class.is_optimal() {
            prop_assert!(v.gap <= 1e-9);
        }
    }

    #[test]
    fn equality_roots_reach_fidelity(a in arb_same_mean(), b in arb_same_mean()) {
        let f = fidelity_same_mean(&a, &b).unwrap().fidelity;
        prop_assume!(f < 1.0 - 1e-9);
        let eq = build_equality_equation(&a, &b, f).unwrap();
        for phi in solve_equality_phi(&eq) {
            prop_assert!((gdist_core::overlap_at(&a, &b, phi) - f).abs() < 1e-9);
        }
    }
}

/// Mixed pairs on the equality surface, built from the quadratic in `s₂`.
fn tangent_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(GaussianParams<f64>, GaussianParams<f64>)> {
    let mut out = Vec::new();
    while out.len() < n {
        let (g1, g2) = (rng.gen_range(1.2..5.0), rng.gen_range(1.2..5.0));
        let (s1, tt) = (rng.gen_range(1.0..4.0), rng.gen_range(0.0..PI));
        let t1 = rng.gen_range(0.0..PI);
        for root in solve_s2_for_optimality(g1, g2, s1, tt).unwrap() {
            out.push((p(g1, s1, t1), p(g2, root.s2, t1 + root.theta_tilde)));
        }
    }
    out
}

#[test]
fn solvability_inequality_matches_root_finding() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut generic = Vec::new();
    for _ in 0..300 {
        generic.push((
            p(rng.gen_range(1.01..6.0), rng.gen_range(1.0..6.0), rng.gen_range(0.0..PI)),
            p(rng.gen_range(1.01..6.0), rng.gen_range(1.0..6.0), rng.gen_range(0.0..PI)),
        ));
    }
    let tangent = tangent_pairs(&mut rng, 100);
    let mut solvable = 0;
    for (a, b) in generic.iter().chain(&tangent) {
        let f = fidelity_same_mean(a, b).unwrap().fidelity;
        if f >= 1.0 - 1e-9 {
            continue;
        }
        let eq = build_equality_equation(a, b, f).unwrap();
        // The closed-form solvability of each branch is a relative
        // tolerance band on the same quantity the root finder tests.
        let band = 1e-9 * eq.coupling.abs().max(1.0) * eq.upsilon_plus().max(1.0);
        let inequality = eq.plus.solvability(eq.coupling) <= band || eq.minus.solvability(eq.coupling) <= band;
        let roots = !solve_equality_phi(&eq).is_empty();
        assert_eq!(inequality, roots, "{a:?} {b:?}");
        solvable += roots as usize;
    }
    assert!(solvable >= 100, "{solvable}");
}

#[test]
fn tangent_pairs_are_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (a, b) in tangent_pairs(&mut rng, 200) {
        let v = check_condition_general(&a, &b).unwrap();
        assert_eq!(v.class, OptimalityClass::MixedMixedOptimal, "{a:?} {b:?} {:?}", v.condition_residual);
        assert!(v.gap.abs() <= 1e-9, "{}", v.gap);
        let f = fidelity_same_mean(&a, &b).unwrap().fidelity;
        let eq = build_equality_equation(&a, &b, f).unwrap();
        assert_eq!(solve_equality_phi(&eq).len(), 1);
    }
}

#[test]
fn verdict_depends_only_on_gammas_and_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let (g1, g2) = (rng.gen_range(1.0..5.0), rng.gen_range(1.0..5.0));
        let (s1, s2, tt) = (rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0), rng.gen_range(0.0..PI));
        let d = squeeze_coupling(s1, s2, tt);
        // Same D from a different (s₁, s₂, θ̃): keep s₁, pick another θ̃ and
        // solve D(s₁, s₂', θ̃') = d for s₂' (a quadratic in s₂').
        let tt2 = rng.gen_range(0.0..PI);
        let c = (2.0 * tt2).cos();
        let (plus, minus) = (s1 + 1.0 / s1, s1 - 1.0 / s1);
        let (qa, qc, half_b) = (plus - minus * c, plus + minus * c, d / 2.0);
        let disc = half_b * half_b - qa * qc;
        if disc < 0.0 {
            continue;
        }
        let s2b = (half_b + disc.sqrt()) / qa;
        let (a1, b1) = (p(g1, s1, 0.3), p(g2, s2, 0.3 + tt));
        let (a2, b2) = (p(g1, s1, 1.0), p(g2, s2b, 1.0 + tt2));
        assert!((squeeze_coupling(s1, s2b, tt2) - d).abs() < 1e-10 * d);
        let v1 = check_condition_general(&a1, &b1).unwrap();
        let v2 = check_condition_general(&a2, &b2).unwrap();
        assert_eq!(v1.class, v2.class);
        assert!((v1.gap - v2.gap).abs() < 1e-9, "{} {}", v1.gap, v2.gap);
    }
}

#[test]
fn special_cases_agree_with_general_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..200 {
        let (g1, g2, s1) = (rng.gen_range(1.1..5.0), rng.gen_range(1.1..5.0), rng.gen_range(1.0..4.0));
        for tt in [0.0, PI / 2.0] {
            let s2 = rng.gen_range(1.0..4.0);
            let (a, b) = (p(g1, s1, 0.0), p(g2, s2, tt));
            let special = special_case_residual(&a, &b, 1e-12).unwrap();
            assert!((2.0 * special - condition_residual(&a, &b)).abs() < 1e-12 * gamma_coupling(g1, g2).max(1.0));
            for root in solve_s2_for_optimality(g1, g2, s1, tt).unwrap() {
                let b = p(g2, root.s2, root.theta_tilde);
                let special = special_case_residual(&a, &b, 1e-12).unwrap();
                let v = check_condition_general(&a, &b).unwrap();
                assert!(special.abs() < 1e-9 * gamma_coupling(g1, g2));
                assert_eq!(v.class, OptimalityClass::MixedMixedOptimal);
            }
        }
    }
}

#[test]
fn pure_mixed_gap_vanishes_continuously() {
    let a = p(1.0, 2.0, 0.0);
    let gaps: Vec<f64> = [1.0 + 1e-6, 1.001, 1.01, 1.05, 1.1, 1.3, 1.6, 2.0, 3.0, 4.0, 6.0]
        .iter()
        .map(|&g2| {
            let v = check_condition_general(&a, &p(g2, 2.0, FRAC_PI_3)).unwrap();
            assert_eq!(v.class, OptimalityClass::PureMixedNeverOptimal);
            v.gap
        })
        .collect();
    assert!(gaps.iter().all(|&g| g > 0.0), "{gaps:?}");
    for w in gaps.windows(2) {
        assert!(w[1] > w[0], "{gaps:?}");
    }
    assert!(gaps[0] < 1e-4, "{gaps:?}");
}

#[test]
fn classify_routes_general_means() {
    let a = GaussianParams::new(3.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    let b = GaussianParams::new(3.0, 1.0, 0.0, 2.0, 0.0).unwrap();
    let v = classify(&a, &b, 1e-9).unwrap();
    assert_eq!(v.class, OptimalityClass::DifferentMeanSymmetricOptimal);
    let c = GaussianParams::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
    let v = classify(&a, &c, 1e-9).unwrap();
    assert_eq!(v.class, OptimalityClass::DifferentMeanSymmetricNotOptimal);
    assert!(v.gap > 0.0);
}
