//! Resource bundles and allocations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::scenario::Scenario;
use crate::{Error, Result};

/// A set of resources, stored as a bitmask over the scenario's resource order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u32) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Bundle holding resources `0..count`.
    pub fn full(count: usize) -> Self {
        debug_assert!(count <= 32);
        if count == 32 {
            Bundle(u32::MAX)
        } else {
            Bundle((1u32 << count) - 1)
        }
    }

    pub fn singleton(resource: usize) -> Self {
        Bundle(1 << resource)
    }

    pub fn contains(self, resource: usize) -> bool {
        self.0 & (1 << resource) != 0
    }

    pub fn with(self, resource: usize) -> Self {
        Bundle(self.0 | (1 << resource))
    }

    pub fn without(self, resource: usize) -> Self {
        Bundle(self.0 & !(1 << resource))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    /// Resource indices in ascending order.
    pub fn resources(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |r| bits & (1 << r) != 0)
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.resources()).finish()
    }
}

/// A partition of the resources among the agents: `bundles[i]` is what agent
/// `i` holds. Every agent has an entry, possibly empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    /// Builds an allocation from per-agent bundles, checking the partition
    /// property against `resource_count`.
    pub fn from_bundles(bundles: Vec<Bundle>, resource_count: usize) -> Result<Self> {
        let mut seen = Bundle::EMPTY;
        for b in &bundles {
            let overlap = seen.intersection(*b);
            if let Some(r) = overlap.resources().next() {
                return Err(Error::DuplicateResource(index_name(r)));
            }
            seen = seen.union(*b);
        }
        let full = Bundle::full(resource_count);
        if let Some(r) = seen.difference(full).resources().next() {
            return Err(Error::UnknownResource(index_name(r)));
        }
        if let Some(r) = full.difference(seen).resources().next() {
            return Err(Error::MissingResource(index_name(r)));
        }
        Ok(Allocation { bundles })
    }

    /// Builds the allocation where resource `r` goes to `owners[r]`.
    pub fn from_owners(owners: &[usize], agent_count: usize) -> Self {
        let mut bundles = alloc::vec![Bundle::EMPTY; agent_count];
        for (r, &owner) in owners.iter().enumerate() {
            bundles[owner] = bundles[owner].with(r);
        }
        Allocation { bundles }
    }

    /// Everything goes to one agent.
    pub fn all_to(agent: usize, agent_count: usize, resource_count: usize) -> Self {
        let mut bundles = alloc::vec![Bundle::EMPTY; agent_count];
        bundles[agent] = Bundle::full(resource_count);
        Allocation { bundles }
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn agent_count(&self) -> usize {
        self.bundles.len()
    }

    /// Owner of each resource, in resource order.
    pub fn owners(&self, resource_count: usize) -> Vec<usize> {
        let mut owners = alloc::vec![usize::MAX; resource_count];
        for (agent, b) in self.bundles.iter().enumerate() {
            for r in b.resources() {
                owners[r] = agent;
            }
        }
        owners
    }

    pub fn owner_of(&self, resource: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(resource))
    }

    /// Position in the canonical enumeration order: the owner vector read as a
    /// base-`agent_count` number, resource 0 most significant.
    pub fn canonical_index(&self, resource_count: usize) -> u128 {
        let base = self.bundles.len() as u128;
        self.owners(resource_count)
            .iter()
            .fold(0u128, |acc, &o| acc * base + o as u128)
    }

    pub(crate) fn from_bundles_unchecked(bundles: Vec<Bundle>) -> Allocation {
        Allocation { bundles }
    }

    /// Renders with the scenario's names, e.g. `{1:{r1,r2}, 2:{}}`.
    pub fn display<'a>(&'a self, scenario: &'a Scenario) -> AllocationDisplay<'a> {
        AllocationDisplay { alloc: self, scenario }
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.bundles.iter()).finish()
    }
}

pub struct AllocationDisplay<'a> {
    alloc: &'a Allocation,
    scenario: &'a Scenario,
}

impl fmt::Display for AllocationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.alloc.bundles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{{", self.scenario.agents()[i])?;
            for (k, r) in b.resources().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                f.write_str(&self.scenario.resources()[r])?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

fn index_name(r: usize) -> String {
    let mut s = String::from("#");
    s.push_str(&r.to_string());
    s
}

/// Turns named bundles into an [`Allocation`] for `scenario`.
///
/// Every scenario agent must be listed exactly once; resources must form a
/// partition of the scenario's resource set.
pub fn validate_allocation<A, R>(scenario: &Scenario, bundles: &[(A, Vec<R>)]) -> Result<Allocation>
where
    A: AsRef<str>,
    R: AsRef<str>,
{
    let n = scenario.agent_count();
    let mut slots: Vec<Option<Bundle>> = alloc::vec![None; n];
    let mut seen = Bundle::EMPTY;
    for (agent, resources) in bundles {
        let agent = agent.as_ref();
        let a = scenario
            .agent_index(agent)
            .ok_or_else(|| Error::UnknownAgent(agent.into()))?;
        if slots[a].is_some() {
            return Err(Error::DuplicateAgent(agent.into()));
        }
        let mut b = Bundle::EMPTY;
        for res in resources {
            let res = res.as_ref();
            let r = scenario
                .resource_index(res)
                .ok_or_else(|| Error::UnknownResource(res.into()))?;
            if seen.contains(r) {
                return Err(Error::DuplicateResource(res.into()));
            }
            seen = seen.with(r);
            b = b.with(r);
        }
        slots[a] = Some(b);
    }
    if let Some(r) = Bundle::full(scenario.resource_count())
        .difference(seen)
        .resources()
        .next()
    {
        return Err(Error::MissingResource(scenario.resources()[r].clone()));
    }
    let mut out = Vec::with_capacity(n);
    for (a, slot) in slots.into_iter().enumerate() {
        match slot {
            Some(b) => out.push(b),
            None => return Err(Error::MissingAgent(scenario.agents()[a].clone())),
        }
    }
    Ok(Allocation { bundles: out })
}

/// All `agent_count ^ resource_count` allocations in canonical order.
#[derive(Clone, Debug)]
pub struct AllocationIter {
    owners: Vec<usize>,
    agent_count: usize,
    done: bool,
}

impl AllocationIter {
    pub(crate) fn new(agent_count: usize, resource_count: usize) -> Self {
        AllocationIter {
            owners: alloc::vec![0; resource_count],
            agent_count,
            done: agent_count == 0,
        }
    }
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let current = Allocation::from_owners(&self.owners, self.agent_count);
        // Increment the owner vector, last resource is the least significant digit.
        let mut k = self.owners.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.owners[k] += 1;
            if self.owners[k] < self.agent_count {
                break;
            }
            self.owners[k] = 0;
        }
        Some(current)
    }
}
