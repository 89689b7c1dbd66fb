//! Deals, their structural classification, composition and decomposition.

use alloc::vec::Vec;

use crate::allocation::{Allocation, Bundle};
use crate::{Error, Result};

/// A move from one allocation to a different one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deal {
    before: Allocation,
    after: Allocation,
}

impl Deal {
    pub fn new(before: Allocation, after: Allocation) -> Result<Self> {
        if before == after {
            return Err(Error::NotADeal);
        }
        if before.agent_count() != after.agent_count() {
            return Err(Error::AgentCountMismatch {
                expected: before.agent_count(),
                got: after.agent_count(),
            });
        }
        Ok(Deal { before, after })
    }

    pub fn before(&self) -> &Allocation {
        &self.before
    }

    pub fn after(&self) -> &Allocation {
        &self.after
    }

    pub fn into_parts(self) -> (Allocation, Allocation) {
        (self.before, self.after)
    }

    /// Agents whose bundle changes, ascending.
    pub fn involved_agents(&self) -> Vec<usize> {
        (0..self.before.agent_count())
            .filter(|&i| self.before.bundle(i) != self.after.bundle(i))
            .collect()
    }

    pub fn involves(&self, agent: usize) -> bool {
        self.before.bundle(agent) != self.after.bundle(agent)
    }

    /// Resources that change hands.
    pub fn moved_resources(&self) -> Bundle {
        self.before
            .bundles()
            .iter()
            .zip(self.after.bundles())
            .fold(Bundle::EMPTY, |acc, (b, a)| acc.union(b.difference(*a)))
    }

    /// A deal is a 1-deal iff exactly one resource changes hands.
    pub fn is_one_deal(&self) -> bool {
        self.moved_resources().len() == 1
    }
}

/// Structural facts about a deal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealStructure {
    pub involved_agents: Vec<usize>,
    pub moved_resource_count: usize,
    pub is_one_deal: bool,
    /// Two agents, each handing exactly one resource to the other.
    pub is_swap: bool,
    /// Two agents, resources flow in one direction only.
    pub is_cluster: bool,
    /// Every agent passes at most one resource to each other agent.
    pub is_multiagent: bool,
    pub is_independently_decomposable: bool,
}

/// Number of resources agent `from` hands to agent `to`.
fn flow(deal: &Deal, from: usize, to: usize) -> usize {
    deal.before.bundle(from).intersection(deal.after.bundle(to)).len()
}

pub fn classify_deal(deal: &Deal) -> DealStructure {
    let involved = deal.involved_agents();
    let moved = deal.moved_resources().len();
    let two = involved.len() == 2;
    let (is_swap, is_cluster) = if two {
        let (i, j) = (involved[0], involved[1]);
        let (ij, ji) = (flow(deal, i, j), flow(deal, j, i));
        (ij == 1 && ji == 1, (ij == 0) != (ji == 0))
    } else {
        (false, false)
    };
    let is_multiagent = involved
        .iter()
        .all(|&i| involved.iter().all(|&j| i == j || flow(deal, i, j) <= 1));
    DealStructure {
        is_one_deal: moved == 1,
        is_swap,
        is_cluster,
        is_multiagent,
        is_independently_decomposable: decompose(deal).is_some(),
        involved_agents: involved,
        moved_resource_count: moved,
    }
}

/// `(A, B) ∘ (B, C) = (A, C)`.
pub fn compose(first: &Deal, second: &Deal) -> Result<Deal> {
    if first.after != second.before {
        return Err(Error::MidpointMismatch);
    }
    if first.before == second.after {
        return Err(Error::DegenerateComposition);
    }
    Deal::new(first.before.clone(), second.after.clone())
}

/// Finds two deals over disjoint agent sets that compose to `deal`, if any.
///
/// Searches every nonempty proper subset `S` of the involved agents for an
/// intermediate allocation `B` with `B(i) = A'(i)` on `S` and `B(i) = A(i)`
/// elsewhere. Exponential in the number of involved agents.
pub fn decompose(deal: &Deal) -> Option<(Deal, Deal)> {
    let involved = deal.involved_agents();
    let k = involved.len();
    if k < 4 {
        // Either S or its complement would be a single agent, and a single
        // agent cannot change its bundle while everyone else stays put.
        return None;
    }
    // Subsets containing involved[0] only; the complement covers the rest.
    for mask in 1u64..(1u64 << (k - 1)) {
        let subset = (mask << 1) | 1;
        if subset == (1u64 << k) - 1 {
            continue;
        }
        let mut bundles = deal.before.bundles().to_vec();
        for (pos, &agent) in involved.iter().enumerate() {
            if subset & (1 << pos) != 0 {
                bundles[agent] = deal.after.bundle(agent);
            }
        }
        if is_partition(&bundles, deal.before.bundles()) {
            let mid = Allocation::from_bundles_unchecked(bundles);
            let first = Deal::new(deal.before.clone(), mid.clone()).ok()?;
            let second = Deal::new(mid, deal.after.clone()).ok()?;
            return Some((first, second));
        }
    }
    None
}

fn is_partition(candidate: &[Bundle], reference: &[Bundle]) -> bool {
    let full = reference.iter().fold(Bundle::EMPTY, |acc, b| acc.union(*b));
    let mut seen = Bundle::EMPTY;
    for b in candidate {
        if !seen.intersection(*b).is_empty() {
            return false;
        }
        seen = seen.union(*b);
    }
    seen == full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::AllocationIter;

    fn deal(before: &[usize], after: &[usize], agents: usize) -> Deal {
        Deal::new(Allocation::from_owners(before, agents), Allocation::from_owners(after, agents)).unwrap()
    }

    #[test]
    fn one_deal_between_two_agents() {
        let d = deal(&[0, 0], &[1, 0], 2);
        let s = classify_deal(&d);
        assert!(s.is_one_deal && s.is_cluster && !s.is_swap);
        assert_eq!(s.involved_agents, [0, 1]);
        assert_eq!(s.moved_resource_count, 1);
        assert!(!s.is_independently_decomposable);
    }

    #[test]
    fn four_agent_parallel_moves_decompose() {
        // r1: 1 -> 2 and r2: 3 -> 4 at the same time.
        let d = deal(&[0, 2], &[1, 3], 4);
        let s = classify_deal(&d);
        assert!(s.is_independently_decomposable);
        let (d1, d2) = decompose(&d).unwrap();
        let back = compose(&d1, &d2).unwrap();
        assert_eq!(back, d);
        let a1 = d1.involved_agents();
        assert!(d2.involved_agents().iter().all(|i| !a1.contains(i)));
    }

    #[test]
    fn swap_is_not_decomposable_by_brute_force() {
        let d = deal(&[0, 1], &[1, 0], 2);
        let s = classify_deal(&d);
        assert!(s.is_swap && !s.is_one_deal && !s.is_cluster && s.is_multiagent);
        // Independent check: no allocation other than the endpoints agrees with
        // one endpoint on every agent.
        let witnesses = AllocationIter::new(2, 2)
            .filter(|b| b != d.before() && b != d.after())
            .filter(|b| (0..2).all(|i| b.bundle(i) == d.before().bundle(i) || b.bundle(i) == d.after().bundle(i)))
            .count();
        assert_eq!(witnesses, 0);
        assert!(!s.is_independently_decomposable);
    }

    #[test]
    fn cluster_of_two_resources_is_not_multiagent() {
        let d = deal(&[0, 0], &[1, 1], 2);
        let s = classify_deal(&d);
        assert!(s.is_cluster && !s.is_multiagent && !s.is_one_deal);
    }

    #[test]
    fn composition_rules() {
        let a = Allocation::from_owners(&[0, 0], 2);
        let b = Allocation::from_owners(&[1, 0], 2);
        let c = Allocation::from_owners(&[1, 1], 2);
        let ab = Deal::new(a.clone(), b.clone()).unwrap();
        let bc = Deal::new(b.clone(), c.clone()).unwrap();
        let ba = Deal::new(b.clone(), a.clone()).unwrap();
        let ca = Deal::new(c.clone(), a.clone()).unwrap();
        assert_eq!(compose(&ab, &bc).unwrap(), Deal::new(a.clone(), c.clone()).unwrap());
        assert_eq!(compose(&ab, &ca), Err(Error::MidpointMismatch));
        assert_eq!(compose(&ab, &ba), Err(Error::DegenerateComposition));
        assert_eq!(Deal::new(a.clone(), a), Err(Error::NotADeal));
    }

    #[test]
    fn small_deals_never_decompose_and_witnesses_recompose() {
        // Exhaustive over every deal with 4 agents and 3 resources.
        let all: Vec<_> = AllocationIter::new(4, 3).collect();
        let mut decomposable = 0;
        for a in &all {
            for b in &all {
                if a == b {
                    continue;
                }
                let d = Deal::new(a.clone(), b.clone()).unwrap();
                let s = classify_deal(&d);
                assert!(s.involved_agents.len() >= 2);
                if s.involved_agents.len() < 4 {
                    assert!(!s.is_independently_decomposable);
                }
                if let Some((d1, d2)) = decompose(&d) {
                    decomposable += 1;
                    assert_eq!(compose(&d1, &d2).unwrap(), d);
                    let first = d1.involved_agents();
                    assert!(d2.involved_agents().iter().all(|i| !first.contains(i)));
                }
            }
        }
        assert!(decomposable > 0);
    }
}
