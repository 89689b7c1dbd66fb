//! Social welfare measures and orderings over allocations.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::allocation::Allocation;
use crate::rational::Rational;
use crate::scenario::Scenario;

/// Agent utilities sorted ascending. Comparing two vectors of equal length
/// with `Ord` is exactly the leximin comparison.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedUtilityVector(Vec<Rational>);

impl OrderedUtilityVector {
    pub fn from_utilities(mut values: Vec<Rational>) -> Self {
        values.sort();
        OrderedUtilityVector(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    /// Running sums `u_1, u_1 + u_2, ...` of the sorted values.
    pub fn prefix_sums(&self) -> Vec<Rational> {
        self.0
            .iter()
            .scan(Rational::ZERO, |acc, v| {
                *acc += *v;
                Some(*acc)
            })
            .collect()
    }
}

/// Printed in angle brackets, e.g. `⟨0,2,5⟩`.
impl fmt::Display for OrderedUtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("⟩")
    }
}

impl fmt::Debug for OrderedUtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WelfareSnapshot {
    pub utilitarian: Rational,
    pub egalitarian: Rational,
    pub elitist: Rational,
    pub ordered: OrderedUtilityVector,
    /// Utilities in agent order.
    pub per_agent: Vec<Rational>,
}

impl WelfareSnapshot {
    pub fn from_profile(per_agent: Vec<Rational>) -> Self {
        let ordered = OrderedUtilityVector::from_utilities(per_agent.clone());
        let values = ordered.values();
        WelfareSnapshot {
            utilitarian: values.iter().sum(),
            egalitarian: values[0],
            elitist: values[values.len() - 1],
            ordered,
            per_agent,
        }
    }
}

pub fn snapshot(scenario: &Scenario, alloc: &Allocation) -> WelfareSnapshot {
    WelfareSnapshot::from_profile(scenario.utility_profile(alloc))
}

/// Leximin comparison. `Less` means `a1` precedes `a2` (is socially worse).
pub fn leximin_compare(scenario: &Scenario, a1: &Allocation, a2: &Allocation) -> Ordering {
    snapshot(scenario, a1).ordered.cmp(&snapshot(scenario, a2).ordered)
}

/// Outcome of comparing two allocations under Lorenz domination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LorenzRelation {
    /// The first is Lorenz dominated by the second.
    DominatedBy,
    /// The first Lorenz dominates the second.
    Dominates,
    Equivalent,
    Incomparable,
}

pub fn lorenz_compare_vectors(x: &OrderedUtilityVector, y: &OrderedUtilityVector) -> LorenzRelation {
    let (px, py) = (x.prefix_sums(), y.prefix_sums());
    let mut below = false;
    let mut above = false;
    for (a, b) in px.iter().zip(&py) {
        match a.cmp(b) {
            Ordering::Less => below = true,
            Ordering::Greater => above = true,
            Ordering::Equal => {}
        }
    }
    match (below, above) {
        (false, false) => LorenzRelation::Equivalent,
        (true, false) => LorenzRelation::DominatedBy,
        (false, true) => LorenzRelation::Dominates,
        (true, true) => LorenzRelation::Incomparable,
    }
}

pub fn lorenz_compare(scenario: &Scenario, a1: &Allocation, a2: &Allocation) -> LorenzRelation {
    lorenz_compare_vectors(&snapshot(scenario, a1).ordered, &snapshot(scenario, a2).ordered)
}

/// Profile-level Pareto improvement: strictly larger sum, nobody worse off.
pub fn pareto_improves_profile(before: &[Rational], after: &[Rational]) -> bool {
    let sum_before: Rational = before.iter().sum();
    let sum_after: Rational = after.iter().sum();
    sum_before < sum_after && before.iter().zip(after).all(|(b, a)| b <= a)
}

/// True iff moving from `a1` to `a2` is a Pareto improvement.
pub fn pareto_improves(scenario: &Scenario, a1: &Allocation, a2: &Allocation) -> bool {
    pareto_improves_profile(&scenario.utility_profile(a1), &scenario.utility_profile(a2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyReport {
    pub is_envy_free: bool,
    pub envious_count: usize,
    /// Sum over agents of the largest amount by which they prefer someone
    /// else's bundle to their own.
    pub total_envy: Rational,
    pub max_envy: Rational,
    /// Envy of each agent, in agent order; 0 for agents without envy.
    pub per_agent: Vec<Rational>,
}

pub fn envy_report(scenario: &Scenario, alloc: &Allocation) -> EnvyReport {
    let n = scenario.agent_count();
    let per_agent: Vec<Rational> = (0..n)
        .map(|i| {
            let own = scenario.utility_in(i, alloc);
            (0..n)
                .filter(|&j| j != i)
                .map(|j| scenario.utility(i, alloc.bundle(j)) - own)
                .fold(Rational::ZERO, |acc, d| if d > acc { d } else { acc })
        })
        .collect();
    let envious_count = per_agent.iter().filter(|e| **e > Rational::ZERO).count();
    EnvyReport {
        is_envy_free: envious_count == 0,
        envious_count,
        total_envy: per_agent.iter().sum(),
        max_envy: per_agent.iter().copied().max().unwrap_or(Rational::ZERO),
        per_agent,
    }
}
