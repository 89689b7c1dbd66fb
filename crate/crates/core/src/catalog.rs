//! Small hand-made scenarios that exercise the interesting corners of the
//! framework. Each comes with the starting allocation it is usually studied
//! from. Agents are named `1..n`, resources `r1..rm`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::Allocation;
use crate::rational::Rational;
use crate::scenario::{Scenario, UtilityFunction};

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Explicit table from literals in bundle-bitmask order (`∅, {r1}, {r2}, {r1,r2}, ...`).
fn table(values: &[&str]) -> UtilityFunction {
    UtilityFunction::Explicit(values.iter().map(|v| v.parse::<Rational>().unwrap()).collect())
}

fn build(utilities: Vec<UtilityFunction>, resources: usize) -> Scenario {
    Scenario::new(names("", utilities.len()), names("r", resources), utilities).unwrap()
}

/// Two agents, two resources; agent 1 starts with both. No 1-deal raises the
/// utilitarian sum (7), handing over both resources does (8).
pub fn cluster_deal_example() -> (Scenario, Allocation) {
    let s = build(vec![table(&["0", "2", "3", "7"]), table(&["0", "3", "3", "8"])], 2);
    (s, Allocation::all_to(0, 2, 2))
}

/// Three agents, two resources; agent 2 starts with both (ordered vector
/// ⟨0,0,17⟩, the utilitarian optimum). Egalitarian welfare is 0 everywhere.
pub fn three_agent_welfare_example() -> (Scenario, Allocation) {
    let s = build(
        vec![
            table(&["0", "5", "3", "8"]),
            table(&["0", "4", "2", "17"]),
            table(&["0", "2", "6", "7"]),
        ],
        2,
    );
    (s, Allocation::all_to(1, 3, 2))
}

/// Two agents, one resource valued 4 by its holder (agent 1) and 7 by agent 2.
pub fn single_resource_example() -> (Scenario, Allocation) {
    let s = build(vec![table(&["0", "4"]), table(&["0", "7"])], 1);
    (s, Allocation::all_to(0, 2, 1))
}

/// Agent 1 is additive (3, 12), agent 2 is not. Starting from
/// `1:{r1}, 2:{r2}` inequality is already minimal, yet swapping raises the
/// minimum utility from 3 to 5.
pub fn minimal_inequality_example() -> (Scenario, Allocation) {
    let u1 = UtilityFunction::Additive(alloc::vec![Rational::from(3), Rational::from(12)]);
    let s = build(vec![u1, table(&["0", "5", "7", "17"])], 2);
    (s, Allocation::from_owners(&[0, 1], 2))
}

/// Agent 3 starts with both resources (⟨0,6,9.5⟩). One equitable deal reaches
/// the egalitarian optimum, a second one still raises the leximin order.
pub fn equitable_past_optimum_example() -> (Scenario, Allocation) {
    let s = build(
        vec![
            table(&["0", "5", "0", "5"]),
            table(&["6", "7", "6.5", "7.5"]),
            table(&["8", "9", "8.5", "9.5"]),
        ],
        2,
    );
    (s, Allocation::all_to(2, 3, 2))
}

/// Agent 3 holds both resources (⟨0,0,10⟩): Pareto optimal, but Lorenz
/// dominated by the three-agent deal giving each of agents 1, 2 their
/// preferred resource. No two-agent deal Lorenz-improves.
pub fn lorenz_three_agent_example() -> (Scenario, Allocation) {
    let s = build(
        vec![
            table(&["0", "6", "1", "7"]),
            table(&["0", "1", "6", "7"]),
            table(&["0", "1", "1", "10"]),
        ],
        2,
    );
    (s, Allocation::all_to(2, 3, 2))
}

/// Two agents with identical preferences where envy-free and Pareto optimal
/// allocations never coincide.
pub fn envy_versus_pareto_example() -> (Scenario, Allocation) {
    let u = table(&["0", "1", "2", "0"]);
    let s = build(vec![u.clone(), u], 2);
    (s, Allocation::all_to(0, 2, 2))
}

/// Two agents who both value the single resource: no envy-free allocation.
pub fn contested_single_resource() -> (Scenario, Allocation) {
    let s = build(vec![table(&["0", "1"]), table(&["0", "1"])], 1);
    (s, Allocation::all_to(0, 2, 1))
}
