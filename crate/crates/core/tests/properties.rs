use negotiate_core::oracle::compute_optima;
use negotiate_core::scengen::{rng, SimRng};
use negotiate_core::*;
use proptest::prelude::*;

const CLASSES: [UtilityClass; 7] = [
    UtilityClass::Unrestricted,
    UtilityClass::NonNegative,
    UtilityClass::Positive,
    UtilityClass::Monotonic,
    UtilityClass::Additive,
    UtilityClass::ZeroOne,
    UtilityClass::Dichotomous,
];

fn scenario_strategy() -> impl Strategy<Value = (Scenario, u64)> {
    (2usize..=3, 1usize..=3, 0usize..CLASSES.len(), any::<u64>()).prop_map(|(n, m, c, seed)| {
        let s = generate(&GeneratorSpec::new(n, m, CLASSES[c], seed)).unwrap();
        (s, seed)
    })
}

fn two_allocations(s: &Scenario, r: &mut SimRng) -> (Allocation, Allocation) {
    let (n, m) = (s.agent_count(), s.resource_count());
    (random_allocation(n, m, r), random_allocation(n, m, r))
}

fn scaled(s: &Scenario, k: Rational, shift: Rational) -> Scenario {
    let utilities = s
        .utilities()
        .iter()
        .map(|u| match u.to_explicit(s.resource_count()) {
            UtilityFunction::Explicit(t) => UtilityFunction::Explicit(t.into_iter().map(|v| v * k + shift).collect()),
            UtilityFunction::Additive(_) => unreachable!(),
        })
        .collect();
    Scenario::new(s.agents().to_vec(), s.resources().to_vec(), utilities).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn criteria_ignore_uninvolved_agents((s, seed) in scenario_strategy()) {
        let mut r = rng(seed);
        let deal = random_deal(s.agent_count(), s.resource_count(), &mut r);
        let outsider = (0..s.agent_count()).find(|&i| !deal.involves(i));
        prop_assume!(outsider.is_some());
        let other = generate(&GeneratorSpec::new(s.agent_count(), s.resource_count(), UtilityClass::Unrestricted, seed ^ 1)).unwrap();
        let changed = s.with_utility(outsider.unwrap(), other.utilities()[0].clone()).unwrap();
        for c in Criterion::ALL {
            prop_assert_eq!(is_admissible(&s, &deal, c), is_admissible(&changed, &deal, c), "{}", c);
        }
    }

    #[test]
    fn lorenz_prefix_sums_bracket_welfare((s, seed) in scenario_strategy()) {
        let a = random_allocation(s.agent_count(), s.resource_count(), &mut rng(seed));
        let w = snapshot(&s, &a);
        let p = w.ordered.prefix_sums();
        prop_assert_eq!(p[0], w.egalitarian);
        prop_assert_eq!(*p.last().unwrap(), w.utilitarian);
    }

    #[test]
    fn leximin_is_a_total_preorder((s, seed) in scenario_strategy()) {
        let mut r = rng(seed);
        let (a, b) = two_allocations(&s, &mut r);
        let c = random_allocation(s.agent_count(), s.resource_count(), &mut r);
        let ab = leximin_compare(&s, &a, &b);
        prop_assert_eq!(ab.reverse(), leximin_compare(&s, &b, &a));
        if ab.is_le() && leximin_compare(&s, &b, &c).is_le() {
            prop_assert!(leximin_compare(&s, &a, &c).is_le());
        }
    }

    #[test]
    fn pareto_improvement_is_lorenz_improvement((s, seed) in scenario_strategy()) {
        let (a, b) = two_allocations(&s, &mut rng(seed));
        if pareto_improves(&s, &a, &b) {
            prop_assert_eq!(lorenz_compare(&s, &a, &b), LorenzRelation::DominatedBy);
        }
        let rel = lorenz_compare(&s, &a, &b);
        let back = lorenz_compare(&s, &b, &a);
        let expected = match rel {
            LorenzRelation::DominatedBy => LorenzRelation::Dominates,
            LorenzRelation::Dominates => LorenzRelation::DominatedBy,
            other => other,
        };
        prop_assert_eq!(back, expected);
    }

    #[test]
    fn optimal_sets_survive_positive_affine_rescaling((s, _) in scenario_strategy(), k in 1i64..6, shift in -3i64..4) {
        let t = scaled(&s, Rational::from(k), Rational::from(shift));
        let (o1, o2) = (compute_optima(&s).unwrap(), compute_optima(&t).unwrap());
        prop_assert_eq!(o1.max_utilitarian.witnesses, o2.max_utilitarian.witnesses);
        prop_assert_eq!(o1.max_egalitarian.witnesses, o2.max_egalitarian.witnesses);
        prop_assert_eq!(o1.leximin_maximal, o2.leximin_maximal);
        prop_assert_eq!(o1.pareto_optimal, o2.pareto_optimal);
        prop_assert_eq!(o1.lorenz_optimal, o2.lorenz_optimal);
        prop_assert_eq!(o1.envy_free, o2.envy_free);
    }

    #[test]
    fn generator_is_deterministic_and_respects_class(n in 2usize..=4, m in 1usize..=4, c in 0usize..CLASSES.len(), seed in any::<u64>()) {
        let spec = GeneratorSpec::new(n, m, CLASSES[c], seed);
        let s = generate(&spec).unwrap();
        prop_assert_eq!(&s, &generate(&spec).unwrap());
        for i in 0..n {
            let k = classify_utility(&s, i);
            let ok = match CLASSES[c] {
                UtilityClass::Unrestricted => true,
                UtilityClass::NonNegative => k.non_negative,
                UtilityClass::Positive => k.positive,
                UtilityClass::Monotonic => k.monotonic,
                UtilityClass::Additive => k.additive,
                UtilityClass::ZeroOne => k.zero_one,
                UtilityClass::Dichotomous => k.dichotomous,
            };
            prop_assert!(ok);
        }
    }

    #[test]
    fn individually_rational_negotiation_is_policy_independent((s, seed) in scenario_strategy()) {
        let start = random_allocation(s.agent_count(), s.resource_count(), &mut rng(seed));
        let best = compute_optima(&s).unwrap().max_utilitarian.value;
        for kind in [PolicyKind::UniformRandom, PolicyKind::FirstInCanonicalOrder, PolicyKind::GreedyWelfareGain] {
            let cfg = NegotiationConfig::new(Criterion::IndividuallyRational).with_policy(Policy::new(kind, seed));
            let trace = run_negotiation(&s, &start, &cfg).unwrap();
            prop_assert_eq!(trace.termination, TerminationReason::NoAdmissibleDeal);
            prop_assert_eq!(trace.terminal_welfare().utilitarian, best);
            prop_assert!(check_monotone(&trace, Criterion::IndividuallyRational));
            for step in &trace.steps {
                prop_assert!(validate_payment(&s, &step.deal, step.payment.as_ref().unwrap()));
            }
        }
    }

    #[test]
    fn decompositions_recompose(seed in any::<u64>(), n in 4usize..=5, m in 2usize..=4) {
        let deal = random_deal(n, m, &mut rng(seed));
        if let Some((d1, d2)) = decompose(&deal) {
            prop_assert_eq!(compose(&d1, &d2).unwrap(), deal.clone());
            let a1 = d1.involved_agents();
            prop_assert!(d2.involved_agents().iter().all(|i| !a1.contains(i)));
        }
        if deal.involved_agents().len() < 4 {
            prop_assert!(decompose(&deal).is_none());
        }
    }

    #[test]
    fn canonical_index_matches_enumeration_position(n in 2usize..=3, m in 1usize..=4) {
        let s = generate(&GeneratorSpec::new(n, m, UtilityClass::ZeroOne, 0)).unwrap();
        for (k, a) in enumerate_allocations(&s).unwrap().enumerate() {
            prop_assert_eq!(a.canonical_index(m), k as u128);
        }
    }
}
