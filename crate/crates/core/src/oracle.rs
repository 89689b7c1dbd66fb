//! Ground truth by exhaustive enumeration of every allocation.
//!
//! No pruning: every optimal set is computed by scanning all allocations, and
//! the Pareto and Lorenz sets by full pairwise comparison.

use alloc::vec::Vec;

use crate::allocation::{Allocation, AllocationIter};
use crate::engine::check_size;
use crate::rational::Rational;
use crate::scenario::Scenario;
use crate::welfare::{envy_report, lorenz_compare_vectors, pareto_improves_profile, snapshot, LorenzRelation, WelfareSnapshot};
use crate::Result;

/// All `|A|^|R|` allocations in canonical order.
pub fn enumerate_allocations(scenario: &Scenario) -> Result<AllocationIter> {
    check_size(scenario)?;
    Ok(AllocationIter::new(scenario.agent_count(), scenario.resource_count()))
}

/// Best value of a welfare function and every allocation attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub witnesses: Vec<Allocation>,
}

impl Optimum {
    pub fn contains(&self, alloc: &Allocation) -> bool {
        self.witnesses.contains(alloc)
    }
}

/// Every allocation set is in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimaReport {
    pub max_utilitarian: Optimum,
    pub max_egalitarian: Optimum,
    pub max_elitist: Optimum,
    pub leximin_maximal: Vec<Allocation>,
    pub pareto_optimal: Vec<Allocation>,
    pub lorenz_optimal: Vec<Allocation>,
    pub envy_free: Vec<Allocation>,
}

fn best_by(scored: &[(Allocation, WelfareSnapshot)], key: impl Fn(&WelfareSnapshot) -> Rational) -> Optimum {
    let value = scored.iter().map(|(_, w)| key(w)).max().expect("at least one allocation");
    Optimum {
        value,
        witnesses: scored.iter().filter(|(_, w)| key(w) == value).map(|(a, _)| a.clone()).collect(),
    }
}

pub fn compute_optima(scenario: &Scenario) -> Result<OptimaReport> {
    let scored: Vec<(Allocation, WelfareSnapshot)> = enumerate_allocations(scenario)?
        .map(|a| {
            let w = snapshot(scenario, &a);
            (a, w)
        })
        .collect();

    let max_utilitarian = best_by(&scored, |w| w.utilitarian);
    let max_egalitarian = best_by(&scored, |w| w.egalitarian);
    let max_elitist = best_by(&scored, |w| w.elitist);

    let leximin_max = scored.iter().map(|(_, w)| &w.ordered).max().expect("nonempty");
    let leximin_maximal = scored
        .iter()
        .filter(|(_, w)| &w.ordered == leximin_max)
        .map(|(a, _)| a.clone())
        .collect();

    let pareto_optimal = scored
        .iter()
        .filter(|(_, w)| !scored.iter().any(|(_, v)| pareto_improves_profile(&w.per_agent, &v.per_agent)))
        .map(|(a, _)| a.clone())
        .collect();

    let lorenz_optimal = scored
        .iter()
        .filter(|(_, w)| {
            !scored
                .iter()
                .any(|(_, v)| lorenz_compare_vectors(&w.ordered, &v.ordered) == LorenzRelation::DominatedBy)
        })
        .map(|(a, _)| a.clone())
        .collect();

    let envy_free = scored
        .iter()
        .filter(|(a, _)| envy_report(scenario, a).is_envy_free)
        .map(|(a, _)| a.clone())
        .collect();

    Ok(OptimaReport {
        max_utilitarian,
        max_egalitarian,
        max_elitist,
        leximin_maximal,
        pareto_optimal,
        lorenz_optimal,
        envy_free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::Error;

    #[test]
    fn cluster_example_optimum() {
        let (s, _) = catalog::cluster_deal_example();
        let rep = compute_optima(&s).unwrap();
        assert_eq!(rep.max_utilitarian.value, Rational::from(8));
        assert_eq!(rep.max_utilitarian.witnesses, [Allocation::all_to(1, 2, 2)]);
    }

    #[test]
    fn three_agent_example_has_zero_egalitarian_everywhere() {
        let (s, a) = catalog::three_agent_welfare_example();
        let rep = compute_optima(&s).unwrap();
        assert_eq!(rep.max_egalitarian.value, Rational::ZERO);
        assert_eq!(rep.max_egalitarian.witnesses.len(), 9);
        let a_prime = Allocation::from_owners(&[0, 1], 3);
        assert!(rep.pareto_optimal.contains(&a) && rep.pareto_optimal.contains(&a_prime));
    }

    #[test]
    fn envy_free_and_pareto_disjoint() {
        let (s, _) = catalog::envy_versus_pareto_example();
        let rep = compute_optima(&s).unwrap();
        assert_eq!(rep.envy_free.len(), 2);
        assert!(rep.envy_free.iter().all(|a| !rep.pareto_optimal.contains(a)));
    }

    #[test]
    fn lorenz_example_sets() {
        let (s, a) = catalog::lorenz_three_agent_example();
        let rep = compute_optima(&s).unwrap();
        assert!(rep.pareto_optimal.contains(&a));
        assert!(!rep.lorenz_optimal.contains(&a));
    }

    #[test]
    fn contested_resource_has_no_envy_free_allocation() {
        let (s, _) = catalog::contested_single_resource();
        let rep = compute_optima(&s).unwrap();
        assert!(rep.envy_free.is_empty());
        assert!(!rep.lorenz_optimal.is_empty() && !rep.pareto_optimal.is_empty());
    }

    #[test]
    fn oversized_scenarios_rejected() {
        let u = crate::UtilityFunction::Additive(alloc::vec![Rational::ZERO; 11]);
        let names = |p: &str, n: usize| (1..=n).map(|i| alloc::format!("{p}{i}")).collect::<Vec<_>>();
        let s = Scenario::new(names("", 4), names("r", 11), alloc::vec![u; 4]).unwrap();
        assert!(matches!(enumerate_allocations(&s), Err(Error::TooLarge { .. })));
        assert!(matches!(compute_optima(&s), Err(Error::TooLarge { .. })));
    }
}
