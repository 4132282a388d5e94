mod common;

use num::{Signed, Zero};
use privsig::belief::{marginal_theta_belief, BeliefDistribution, Posterior, StateSpace};
use privsig::blackwell::{check_mps, compare, garble, Relation};
use privsig::extension::{enumerate_min_extensions, solve_min_extension, verify_min_extension, MinExtension};
use privsig::frontier::{expost_frontier_support, frontier, inferential_frontier_membership, permissible, PrivacySpec};
use privsig::io::{ProblemFile, ResultFile};
use privsig::io::schema::{BeliefJson, SpaceJson};
use privsig::lp::{enumerate_vertices, maximize, LinearSystem};
use privsig::rational::{dot, frac, int, parse, render, zero, Rational};
use privsig::synthesis::{
    composite_belief_distribution, conditional_privacy_check, conditionally_revealing_check, quantile_signal, reorder,
    synthesize, uniform_marginal_check, verify_undominated, CompositeSignal, ExtensionChoice, Interval, Reordering,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn random_box_system(r: &mut impl Rng) -> LinearSystem {
    let n = r.gen_range(1..=3);
    let mut sys = LinearSystem::nonnegative(n);
    for i in 0..n {
        sys.set_upper(i, int(r.gen_range(1..=3)));
    }
    for _ in 0..r.gen_range(0..=2) {
        let c: Vec<Rational> = (0..n).map(|_| int(r.gen_range(-2..=2))).collect();
        sys.add_le(c, frac(r.gen_range(0..=6), 2));
    }
    if r.gen_bool(0.3) {
        let c: Vec<Rational> = (0..n).map(|_| int(r.gen_range(0..=2))).collect();
        let rhs = frac(r.gen_range(0..=4), 2);
        sys.add_eq(c, rhs);
    }
    sys
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn vertices_match_brute_force(seed in any::<u64>()) {
        let sys = random_box_system(&mut rng(seed));
        let got = enumerate_vertices(&sys).unwrap();
        prop_assert_eq!(&got, &brute_force_vertices(&sys));
        for v in &got {
            prop_assert!(sys.eq_residuals(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn maximum_is_attained_at_a_vertex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_box_system(&mut r);
        let c: Vec<Rational> = (0..sys.num_vars).map(|_| int(r.gen_range(-3..=3))).collect();
        let verts = brute_force_vertices(&sys);
        match maximize(&sys, &c).unwrap() {
            None => prop_assert!(verts.is_empty()),
            Some((value, x)) => {
                prop_assert!(sys.satisfies(&x));
                prop_assert_eq!(&dot(&c, &x), &value);
                let best = verts.iter().map(|v| dot(&c, v)).max().unwrap();
                prop_assert_eq!(value, best);
            }
        }
    }

    #[test]
    fn garbling_is_dominated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, tau) = random_instance(&mut r, 3, 3, 4);
        let g = random_garbling(&mut r, tau.len(), 4);
        let coarse = garble(&tau, &g).unwrap();
        let d = check_mps(&tau, &coarse).unwrap();
        prop_assert!(d.is_some());
        prop_assert!(d.unwrap().verify(&tau, &coarse));
        prop_assert!(compare(&tau, &coarse).unwrap().relation != Relation::Dominated);
    }

    #[test]
    fn dominance_is_antisymmetric_up_to_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, a) = random_instance(&mut r, 2, 2, 3);
        let (_, b) = random_instance(&mut r, 2, 2, 3);
        let ab = compare(&a, &b).unwrap().relation;
        let ba = compare(&b, &a).unwrap().relation;
        let mirrored = match ab {
            Relation::Dominates => Relation::Dominated,
            Relation::Dominated => Relation::Dominates,
            other => other,
        };
        prop_assert_eq!(ba, mirrored);
        if ab == Relation::Equivalent {
            prop_assert_eq!(a, b);
        }
    }
}

fn cond_oracle(e: &MinExtension) -> bool {
    e.cond.iter().flatten().all(|x| !x.is_negative()) && e.residuals().all_zero()
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn extension_vertices_are_valid(seed in any::<u64>()) {
        let (space, gamma) = random_instance(&mut rng(seed), 3, 5, 3);
        let verts = enumerate_min_extensions(&gamma, &space).unwrap();
        prop_assert!(!verts.is_empty());
        for e in &verts {
            prop_assert!(cond_oracle(e));
            prop_assert!(verify_min_extension(&e.tau(), &gamma, &space));
        }
        let w = random_simplex(&mut rng(seed ^ 1), verts.len(), true);
        let mix = MinExtension::mixture(&verts, &w).unwrap();
        prop_assert!(cond_oracle(&mix));
        prop_assert!(verify_min_extension(&mix.tau(), &gamma, &space));
    }

    #[test]
    fn extension_keeps_the_privacy_marginal(seed in any::<u64>()) {
        let (space, gamma) = random_instance(&mut rng(seed), 4, 6, 4);
        let e = solve_min_extension(&gamma, &space).unwrap();
        let tau = e.tau();
        prop_assert_eq!(marginal_theta_belief(&tau, &space).unwrap(), gamma);
        prop_assert_eq!(tau.mean(), space.prior().weights().to_vec());
    }

    #[test]
    fn garbling_a_min_extension_within_the_marginal_changes_nothing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (space, gamma) = random_instance(&mut r, 3, 5, 3);
        let tau = solve_min_extension(&gamma, &space).unwrap().tau();
        let g = random_garbling(&mut r, tau.len(), tau.len());
        let coarse = garble(&tau, &g).unwrap();
        if marginal_theta_belief(&coarse, &space).unwrap() == gamma {
            prop_assert_eq!(compare(&tau, &coarse).unwrap().relation, Relation::Equivalent);
        }
    }
}

fn random_expost(r: &mut impl Rng) -> (Posterior, LinearSystem) {
    let k = r.gen_range(2..=3);
    let prior = post(&random_simplex(r, k, false));
    let mut sys = LinearSystem::new(k);
    for _ in 0..r.gen_range(1..=3) {
        let c: Vec<Rational> = (0..k).map(|_| int(r.gen_range(-3..=3))).collect();
        let rhs = dot(&c, prior.weights()) + frac(r.gen_range(0..=4), 8);
        sys.add_le(c, rhs);
    }
    (prior, sys)
}

/// A point is a vertex when its active constraints pin it down uniquely.
fn is_vertex(sys: &LinearSystem, x: &[Rational]) -> bool {
    let n = x.len();
    let mut rows: Vec<(Vec<Rational>, Rational)> = sys.eq_rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    rows.extend(sys.ineq_rows.iter().filter(|r| dot(&r.coeffs, x) == r.rhs).map(|r| (r.coeffs.clone(), r.rhs.clone())));
    for (i, b) in sys.bounds.iter().enumerate() {
        if b.lower.as_ref() == Some(&x[i]) || b.upper.as_ref() == Some(&x[i]) {
            let mut c = vec![zero(); n];
            c[i] = int(1);
            rows.push((c, x[i].clone()));
        }
    }
    solve_unique(&rows, n).as_deref() == Some(x)
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn expost_support_points_are_extreme(seed in any::<u64>()) {
        let (prior, sys) = random_expost(&mut rng(seed));
        let spec = PrivacySpec::ex_post(sys, &prior).unwrap();
        let PrivacySpec::ExPost { constraints } = &spec else { unreachable!() };
        for p in expost_frontier_support(constraints).unwrap() {
            prop_assert!(is_vertex(constraints, p.weights()));
        }
    }

    #[test]
    fn permissible_sets_are_lower_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(2..=3);
        let prior = post(&random_simplex(&mut r, k, false));
        let lambda = int(1) + frac(r.gen_range(1..=8), r.gen_range(1..=3));
        let spec = PrivacySpec::inferential(lambda.clone()).unwrap();
        let top = frontier(&spec, &prior).unwrap().gamma;
        prop_assert!(inferential_frontier_membership(&top, &prior, &lambda).unwrap());
        let g = garble(&top, &random_garbling(&mut r, top.len(), 4)).unwrap();
        prop_assert!(permissible(&g, &spec, &prior).unwrap());
        let gg = garble(&g, &random_garbling(&mut r, g.len(), 4)).unwrap();
        prop_assert!(permissible(&gg, &spec, &prior).unwrap());
    }
}

/// Random reassignment of the order of states inside every block.
fn shuffled_blocks(mu: &Posterior, space: &StateSpace, r: &mut impl Rng) -> Reordering {
    let mut intervals = Vec::new();
    for t in 0..space.num_theta() {
        let mut live: Vec<usize> = space.block(t).into_iter().filter(|&w| mu.get(w).is_positive()).collect();
        let mass = live.iter().fold(zero(), |a, &w| a + mu.get(w));
        live.shuffle(r);
        let mut start = zero();
        for w in live {
            let end = &start + mu.get(w) / &mass;
            intervals.push((w, vec![(start.clone(), end.clone()) as Interval]));
            start = end;
        }
    }
    Reordering { intervals }
}

fn inferential_case(r: &mut impl Rng) -> (StateSpace, PrivacySpec, BeliefDistribution) {
    let k = r.gen_range(2..=3);
    let prior_theta = random_simplex(r, k, false);
    let n = r.gen_range(k..=5);
    let space = random_space_with_prior(r, n, &prior_theta);
    let spec = PrivacySpec::inferential(int(2)).unwrap();
    let gamma = frontier(&spec, &space.prior_theta()).unwrap().gamma;
    (space, spec, gamma)
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn reordering_preserves_the_branch_checks(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (space, gamma) = random_instance(&mut r, 3, 6, 3);
        let e = solve_min_extension(&gamma, &space).unwrap();
        for mu in &e.extended_atoms {
            let q = quantile_signal(mu, &space).unwrap();
            let moved = reorder(&q, mu, &shuffled_blocks(mu, &space, &mut r)).unwrap();
            prop_assert!(moved.validate(mu).is_ok());
            prop_assert!(conditional_privacy_check(&moved, mu));
            prop_assert!(uniform_marginal_check(&moved, mu));
            prop_assert!(conditionally_revealing_check(&moved, mu));
        }
    }

    #[test]
    fn synthesis_round_trip(seed in any::<u64>()) {
        let (space, spec, gamma) = inferential_case(&mut rng(seed));
        let c = synthesize(&gamma, &spec, &space, &ExtensionChoice::Vertex(0), None).unwrap();
        let tau = composite_belief_distribution(&c).unwrap();
        prop_assert_eq!(marginal_theta_belief(&tau, &space).unwrap(), gamma);
        for check in verify_undominated(&c, &spec).unwrap() {
            prop_assert!(check.passed, "{}", check.name);
        }
    }

    #[test]
    fn garbled_branch_is_dominated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (space, spec, gamma) = inferential_case(&mut r);
        let c = synthesize(&gamma, &spec, &space, &ExtensionChoice::Vertex(0), None).unwrap();
        let n = r.gen_range(0..c.branch_signals.len());
        let mu = c.extension.extended_atoms[n].clone();
        let mut branches = c.branch_signals.clone();
        branches[n] = branches[n].fully_garbled(&mu);
        let garbled = CompositeSignal { extension: c.extension.clone(), branch_signals: branches };
        let full = composite_belief_distribution(&c).unwrap();
        let coarse = composite_belief_distribution(&garbled).unwrap();
        let rel = compare(&full, &coarse).unwrap().relation;
        prop_assert!(rel == Relation::Dominates || rel == Relation::Equivalent);
    }
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| frac(n, d))
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn rational_text_round_trip(x in rational_strategy()) {
        prop_assert_eq!(parse(&render(&x)).unwrap(), x);
    }

    #[test]
    fn belief_json_round_trip(seed in any::<u64>()) {
        let (space, gamma) = random_instance(&mut rng(seed), 3, 5, 4);
        let text = serde_json::to_string(&BeliefJson::from_dist(&gamma)).unwrap();
        let back: BeliefJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_dist().unwrap(), gamma.clone());
        let sj = SpaceJson::from_space(&space);
        let file = ProblemFile {
            version: 1,
            space: sj,
            privacy: None,
            gamma: Some(BeliefJson::from_dist(&gamma)),
            gamma_b: None,
            tau: None,
            composite: None,
        };
        let again = ProblemFile::parse(&serde_json::to_string_pretty(&file).unwrap()).unwrap();
        prop_assert_eq!(&again, &file);
        let problem = again.load().unwrap();
        prop_assert_eq!(problem.space, space);
    }

    #[test]
    fn result_file_round_trip(seed in any::<u64>()) {
        let (_, gamma) = random_instance(&mut rng(seed), 3, 3, 3);
        let r = ResultFile::ok("frontier", serde_json::to_value(BeliefJson::from_dist(&gamma)).unwrap());
        let text = r.to_json();
        let back: ResultFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
    }
}
