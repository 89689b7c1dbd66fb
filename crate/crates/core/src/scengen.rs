//! Scenario construction: seeded random generators per utility class, and
//! adversarial instances in which one given deal is the only way forward.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::{Allocation, Bundle};
use crate::deal::{decompose, Deal};
use crate::rational::Rational;
use crate::scenario::{Scenario, UtilityFunction, MAX_EXPLICIT_RESOURCES, MAX_RESOURCES};
use crate::welfare::snapshot;
use crate::{Error, Result};

/// The deterministic generator behind every seeded operation.
pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th trial of a campaign started at `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UtilityClass {
    Unrestricted,
    NonNegative,
    Positive,
    Monotonic,
    Additive,
    ZeroOne,
    Dichotomous,
}

impl UtilityClass {
    fn is_explicit(self) -> bool {
        !matches!(self, UtilityClass::Additive | UtilityClass::ZeroOne)
    }
}

impl fmt::Display for UtilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtilityClass::Unrestricted => "unrestricted",
            UtilityClass::NonNegative => "non-negative",
            UtilityClass::Positive => "positive",
            UtilityClass::Monotonic => "monotonic",
            UtilityClass::Additive => "additive",
            UtilityClass::ZeroOne => "zero-one",
            UtilityClass::Dichotomous => "dichotomous",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub agent_count: usize,
    pub resource_count: usize,
    pub utility_class: UtilityClass,
    /// Inclusive integer bounds for drawn values. Ignored by the 0/1 classes.
    pub value_range: (i64, i64),
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(agent_count: usize, resource_count: usize, utility_class: UtilityClass, seed: u64) -> Self {
        GeneratorSpec { agent_count, resource_count, utility_class, value_range: (-10, 10), seed }
    }

    pub fn with_range(mut self, lo: i64, hi: i64) -> Self {
        self.value_range = (lo, hi);
        self
    }
}

pub fn agent_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{i}")).collect()
}

pub fn resource_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("r{i}")).collect()
}

fn invalid(msg: &str) -> Error {
    Error::InvalidSpec(msg.into())
}

/// Draws a scenario whose every utility function belongs to the requested class.
pub fn generate(spec: &GeneratorSpec) -> Result<Scenario> {
    let (n, m) = (spec.agent_count, spec.resource_count);
    if n < 2 {
        return Err(invalid("need at least two agents"));
    }
    if m == 0 || m > MAX_RESOURCES {
        return Err(invalid("resource count out of range"));
    }
    if spec.utility_class.is_explicit() && m > MAX_EXPLICIT_RESOURCES {
        return Err(invalid("explicit utility classes support at most 12 resources"));
    }
    let (lo, hi) = spec.value_range;
    if lo > hi {
        return Err(invalid("empty value range"));
    }
    let (lo, hi) = match spec.utility_class {
        UtilityClass::NonNegative => (lo.max(0), hi),
        UtilityClass::Positive => (lo.max(1), hi),
        _ => (lo, hi),
    };
    if lo > hi {
        return Err(invalid("value range incompatible with utility class"));
    }
    let mut rng = rng(spec.seed);
    let bundles = 1usize << m;
    let draw = |rng: &mut SimRng| Rational::from(rng.gen_range(lo..=hi));
    let utilities = (0..n)
        .map(|_| match spec.utility_class {
            UtilityClass::Unrestricted | UtilityClass::NonNegative => {
                UtilityFunction::Explicit((0..bundles).map(|_| draw(&mut rng)).collect())
            }
            UtilityClass::Positive => {
                let mut table: Vec<Rational> = (0..bundles).map(|_| draw(&mut rng)).collect();
                table[0] = Rational::ZERO;
                UtilityFunction::Explicit(table)
            }
            UtilityClass::Monotonic => {
                // Running maximum over immediate subsets; submasks come first.
                let mut table: Vec<Rational> = Vec::with_capacity(bundles);
                for bits in 0..bundles {
                    let mut v = draw(&mut rng);
                    for r in 0..m {
                        if bits & (1 << r) != 0 && table[bits & !(1 << r)] > v {
                            v = table[bits & !(1 << r)];
                        }
                    }
                    table.push(v);
                }
                UtilityFunction::Explicit(table)
            }
            UtilityClass::Additive => UtilityFunction::Additive((0..m).map(|_| draw(&mut rng)).collect()),
            UtilityClass::ZeroOne => {
                UtilityFunction::Additive((0..m).map(|_| Rational::from(rng.gen_range(0..=1i64))).collect())
            }
            UtilityClass::Dichotomous => UtilityFunction::Explicit(
                (0..bundles).map(|_| Rational::from(rng.gen_range(0..=1i64))).collect(),
            ),
        })
        .collect();
    Scenario::new(agent_names(n), resource_names(m), utilities)
}

pub fn random_allocation<R: Rng>(agent_count: usize, resource_count: usize, rng: &mut R) -> Allocation {
    let owners: Vec<usize> = (0..resource_count).map(|_| rng.gen_range(0..agent_count)).collect();
    Allocation::from_owners(&owners, agent_count)
}

/// A uniformly drawn deal (pair of distinct allocations).
pub fn random_deal<R: Rng>(agent_count: usize, resource_count: usize, rng: &mut R) -> Deal {
    loop {
        let a = random_allocation(agent_count, resource_count, rng);
        let b = random_allocation(agent_count, resource_count, rng);
        if let Ok(d) = Deal::new(a, b) {
            return d;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NecessityVariant {
    /// `u_i(R) = |R| + ε` on the favoured bundles, `|R|` elsewhere; `0 < ε < 1`.
    Monotonic { epsilon: Rational },
    /// 1 on the favoured bundles, 0 elsewhere.
    Dichotomous,
    /// The same dichotomous functions, read for egalitarian welfare.
    EgalitarianDichotomous,
}

impl NecessityVariant {
    pub fn monotonic_default() -> Self {
        NecessityVariant::Monotonic { epsilon: Rational::new(1, 2) }
    }
}

/// Welfare values the construction guarantees, from its closed-form formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedWelfare {
    pub target_utilitarian: Rational,
    pub initial_utilitarian: Rational,
    /// Only asserted by the dichotomous shapes: `sw_e(A') = 1`, `sw_e(A) = 0`.
    pub target_egalitarian: Option<Rational>,
    pub initial_egalitarian: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessityInstance {
    pub scenario: Scenario,
    /// `deal.before`, the starting point.
    pub initial: Allocation,
    /// `deal.after`, the unique optimum.
    pub target: Allocation,
    /// The agent whose bundle at the start is not favoured.
    pub distinguished_agent: usize,
    pub predicted: PredictedWelfare,
}

/// Builds utility functions under which `deal` is the only admissible move
/// from its starting allocation and leads to the unique optimum.
///
/// The distinguished agent is the lowest-indexed agent whose bundle changes.
/// Every agent favours its bundle after the deal; every other agent also
/// favours its bundle before the deal.
pub fn necessity_construction(
    agent_count: usize,
    resource_count: usize,
    deal: &Deal,
    variant: NecessityVariant,
) -> Result<NecessityInstance> {
    if agent_count < 2 {
        return Err(Error::TooFewAgents(agent_count));
    }
    if resource_count == 0 {
        return Err(Error::NoResources);
    }
    if resource_count > MAX_EXPLICIT_RESOURCES {
        return Err(Error::TooManyResources { got: resource_count, limit: MAX_EXPLICIT_RESOURCES });
    }
    for alloc in [deal.before(), deal.after()] {
        if alloc.agent_count() != agent_count {
            return Err(Error::AgentCountMismatch { expected: agent_count, got: alloc.agent_count() });
        }
        Allocation::from_bundles(alloc.bundles().to_vec(), resource_count)?;
    }
    if let NecessityVariant::Monotonic { epsilon } = variant {
        if epsilon <= Rational::ZERO || epsilon >= Rational::ONE {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
    }
    if decompose(deal).is_some() {
        return Err(Error::DecomposableDeal);
    }
    let (before, after) = (deal.before(), deal.after());
    let j = deal.involved_agents()[0];

    let utilities = (0..agent_count)
        .map(|i| {
            let favoured = |b: Bundle| b == after.bundle(i) || (b == before.bundle(i) && i != j);
            let table = (0..1u32 << resource_count)
                .map(|bits| {
                    let b = Bundle::from_bits(bits);
                    match variant {
                        NecessityVariant::Monotonic { epsilon } => {
                            let size = Rational::from(b.len());
                            if favoured(b) { size + epsilon } else { size }
                        }
                        NecessityVariant::Dichotomous | NecessityVariant::EgalitarianDichotomous => {
                            if favoured(b) { Rational::ONE } else { Rational::ZERO }
                        }
                    }
                })
                .collect();
            UtilityFunction::Explicit(table)
        })
        .collect();
    let scenario = Scenario::new(agent_names(agent_count), resource_names(resource_count), utilities)?;

    let n = Rational::from(agent_count);
    let predicted = match variant {
        NecessityVariant::Monotonic { epsilon } => {
            let target = Rational::from(resource_count) + epsilon * n;
            PredictedWelfare {
                target_utilitarian: target,
                initial_utilitarian: target - epsilon,
                target_egalitarian: None,
                initial_egalitarian: None,
            }
        }
        NecessityVariant::Dichotomous | NecessityVariant::EgalitarianDichotomous => PredictedWelfare {
            target_utilitarian: n,
            initial_utilitarian: n - Rational::ONE,
            target_egalitarian: Some(Rational::ONE),
            initial_egalitarian: Some(Rational::ZERO),
        },
    };
    debug_assert_eq!(snapshot(&scenario, after).utilitarian, predicted.target_utilitarian);
    debug_assert_eq!(snapshot(&scenario, before).utilitarian, predicted.initial_utilitarian);

    Ok(NecessityInstance {
        scenario,
        initial: before.clone(),
        target: after.clone(),
        distinguished_agent: j,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::classify_utility;
    use crate::welfare::snapshot;

    #[test]
    fn zero_one_spec_yields_zero_one_functions() {
        let s = generate(&GeneratorSpec::new(3, 4, UtilityClass::ZeroOne, 7)).unwrap();
        assert!((0..3).all(|i| classify_utility(&s, i).zero_one));
    }

    #[test]
    fn every_class_is_respected() {
        for class in [
            UtilityClass::Unrestricted,
            UtilityClass::NonNegative,
            UtilityClass::Positive,
            UtilityClass::Monotonic,
            UtilityClass::Additive,
            UtilityClass::ZeroOne,
            UtilityClass::Dichotomous,
        ] {
            for seed in 0..20 {
                let s = generate(&GeneratorSpec::new(3, 3, class, seed).with_range(-10, 10)).unwrap();
                for i in 0..3 {
                    let c = classify_utility(&s, i);
                    let ok = match class {
                        UtilityClass::Unrestricted => true,
                        UtilityClass::NonNegative => c.non_negative,
                        UtilityClass::Positive => c.positive,
                        UtilityClass::Monotonic => c.monotonic,
                        UtilityClass::Additive => c.additive,
                        UtilityClass::ZeroOne => c.zero_one,
                        UtilityClass::Dichotomous => c.dichotomous,
                    };
                    assert!(ok, "{class} seed {seed} agent {i}: {c:?}");
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::new(4, 3, UtilityClass::Monotonic, 99);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_ne!(generate(&spec).unwrap(), generate(&GeneratorSpec { seed: 100, ..spec }).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(generate(&GeneratorSpec::new(1, 2, UtilityClass::Additive, 0)), Err(Error::InvalidSpec(_))));
        assert!(matches!(
            generate(&GeneratorSpec::new(2, 2, UtilityClass::Positive, 0).with_range(-5, 0)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(generate(&GeneratorSpec::new(2, 13, UtilityClass::Dichotomous, 0)), Err(Error::InvalidSpec(_))));
        assert!(generate(&GeneratorSpec::new(2, 13, UtilityClass::ZeroOne, 0)).is_ok());
    }

    fn swap() -> Deal {
        Deal::new(Allocation::from_owners(&[0, 1], 2), Allocation::from_owners(&[1, 0], 2)).unwrap()
    }

    #[test]
    fn monotonic_swap_construction() {
        let inst = necessity_construction(2, 2, &swap(), NecessityVariant::monotonic_default()).unwrap();
        assert_eq!(snapshot(&inst.scenario, &inst.target).utilitarian, Rational::from(3));
        assert_eq!(snapshot(&inst.scenario, &inst.initial).utilitarian, Rational::new(5, 2));
        assert!((0..2).all(|i| classify_utility(&inst.scenario, i).monotonic));
    }

    #[test]
    fn dichotomous_swap_construction() {
        let inst = necessity_construction(2, 2, &swap(), NecessityVariant::Dichotomous).unwrap();
        let s = &inst.scenario;
        assert_eq!(snapshot(s, &inst.target).utilitarian, Rational::from(2));
        assert_eq!(snapshot(s, &inst.initial).utilitarian, Rational::ONE);
        // Agent 1 (distinguished): only {r2} is worth 1.
        let r1 = Bundle::singleton(0);
        let r2 = Bundle::singleton(1);
        assert_eq!(s.utility(0, r2), Rational::ONE);
        assert_eq!(s.utility(0, r1), Rational::ZERO);
        assert_eq!(s.utility(0, Bundle::EMPTY), Rational::ZERO);
        // Agent 2 favours both {r1} (after) and {r2} (before).
        assert_eq!(s.utility(1, r1), Rational::ONE);
        assert_eq!(s.utility(1, r2), Rational::ONE);
        assert_eq!(s.utility(1, r1.union(r2)), Rational::ZERO);
        let c = classify_utility(s, 1);
        assert!(c.dichotomous && !c.additive);
    }

    #[test]
    fn construction_rejects_bad_input() {
        let d = Deal::new(Allocation::from_owners(&[0, 2], 4), Allocation::from_owners(&[1, 3], 4)).unwrap();
        assert_eq!(necessity_construction(4, 2, &d, NecessityVariant::Dichotomous), Err(Error::DecomposableDeal));
        assert_eq!(
            necessity_construction(2, 2, &swap(), NecessityVariant::Monotonic { epsilon: Rational::new(3, 2) }),
            Err(Error::EpsilonOutOfRange(Rational::new(3, 2)))
        );
        assert!(matches!(
            necessity_construction(2, 2, &swap(), NecessityVariant::Monotonic { epsilon: Rational::ZERO }),
            Err(Error::EpsilonOutOfRange(_))
        ));
    }
}
