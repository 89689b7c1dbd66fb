//! Scenarios: agents, resources and one utility function per agent.

use alloc::string::String;
use alloc::vec::Vec;

use crate::allocation::{Allocation, Bundle};
use crate::rational::Rational;
use crate::{Error, Result};

/// Explicit tables hold `2^|R|` entries; beyond this they are rejected.
pub const MAX_EXPLICIT_RESOURCES: usize = 12;
/// Bundles are 32-bit masks.
pub const MAX_RESOURCES: usize = 32;

/// A utility function over bundles of resources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilityFunction {
    /// One value per bundle, indexed by the bundle's bitmask.
    Explicit(Vec<Rational>),
    /// One value per resource; a bundle is worth the sum of its members.
    Additive(Vec<Rational>),
}

impl UtilityFunction {
    pub fn value(&self, bundle: Bundle) -> Rational {
        match self {
            UtilityFunction::Explicit(table) => table[bundle.bits() as usize],
            UtilityFunction::Additive(per_resource) => {
                bundle.resources().map(|r| per_resource[r]).sum()
            }
        }
    }

    /// Expands to a full table over `resource_count` resources.
    pub fn to_explicit(&self, resource_count: usize) -> UtilityFunction {
        match self {
            UtilityFunction::Explicit(_) => self.clone(),
            UtilityFunction::Additive(_) => UtilityFunction::Explicit(
                (0..1u32 << resource_count)
                    .map(|bits| self.value(Bundle::from_bits(bits)))
                    .collect(),
            ),
        }
    }

    pub fn is_additive_repr(&self) -> bool {
        matches!(self, UtilityFunction::Additive(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    agents: Vec<String>,
    resources: Vec<String>,
    utilities: Vec<UtilityFunction>,
}

impl Scenario {
    pub fn new(
        agents: Vec<String>,
        resources: Vec<String>,
        utilities: Vec<UtilityFunction>,
    ) -> Result<Self> {
        if agents.len() < 2 {
            return Err(Error::TooFewAgents(agents.len()));
        }
        if resources.is_empty() {
            return Err(Error::NoResources);
        }
        if resources.len() > MAX_RESOURCES {
            return Err(Error::TooManyResources { got: resources.len(), limit: MAX_RESOURCES });
        }
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(Error::DuplicateAgent(a.clone()));
            }
        }
        for (i, r) in resources.iter().enumerate() {
            if resources[..i].contains(r) {
                return Err(Error::DuplicateResourceId(r.clone()));
            }
        }
        if utilities.len() != agents.len() {
            return Err(Error::UtilityCountMismatch { expected: agents.len(), got: utilities.len() });
        }
        let m = resources.len();
        for (agent, u) in agents.iter().zip(&utilities) {
            match u {
                UtilityFunction::Explicit(table) => {
                    if m > MAX_EXPLICIT_RESOURCES {
                        return Err(Error::TooManyResources { got: m, limit: MAX_EXPLICIT_RESOURCES });
                    }
                    if table.len() != 1 << m {
                        return Err(Error::UtilityTableSize {
                            agent: agent.clone(),
                            expected: 1 << m,
                            got: table.len(),
                        });
                    }
                }
                UtilityFunction::Additive(values) => {
                    if values.len() != m {
                        return Err(Error::UtilityTableSize {
                            agent: agent.clone(),
                            expected: m,
                            got: values.len(),
                        });
                    }
                }
            }
        }
        Ok(Scenario { agents, resources, utilities })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn utilities(&self) -> &[UtilityFunction] {
        &self.utilities
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn resource_index(&self, name: &str) -> Option<usize> {
        self.resources.iter().position(|r| r == name)
    }

    /// `u_agent(bundle)`.
    pub fn utility(&self, agent: usize, bundle: Bundle) -> Rational {
        self.utilities[agent].value(bundle)
    }

    /// Utility of `agent` for its own bundle in `alloc`.
    pub fn utility_in(&self, agent: usize, alloc: &Allocation) -> Rational {
        self.utility(agent, alloc.bundle(agent))
    }

    /// Per-agent utilities of `alloc`, in agent order.
    pub fn utility_profile(&self, alloc: &Allocation) -> Vec<Rational> {
        (0..self.agent_count()).map(|i| self.utility_in(i, alloc)).collect()
    }

    /// Number of allocations, `|A|^|R|`.
    pub fn allocation_count(&self) -> u128 {
        (self.agent_count() as u128).saturating_pow(self.resource_count() as u32)
    }

    /// Copy of this scenario with one agent's utility function replaced.
    pub fn with_utility(&self, agent: usize, u: UtilityFunction) -> Result<Scenario> {
        let mut utilities = self.utilities.clone();
        utilities[agent] = u;
        Scenario::new(self.agents.clone(), self.resources.clone(), utilities)
    }

    pub fn bundle_from_names<R: AsRef<str>>(&self, names: &[R]) -> Result<Bundle> {
        names.iter().try_fold(Bundle::EMPTY, |b, name| {
            let name = name.as_ref();
            self.resource_index(name)
                .map(|r| b.with(r))
                .ok_or_else(|| Error::UnknownResource(name.into()))
        })
    }
}

/// Named lookup: `u_agent(bundle)`.
pub fn utility_of<R: AsRef<str>>(scenario: &Scenario, agent: &str, bundle: &[R]) -> Result<Rational> {
    let i = scenario
        .agent_index(agent)
        .ok_or_else(|| Error::UnknownAgent(agent.into()))?;
    let b = scenario.bundle_from_names(bundle)?;
    Ok(scenario.utility(i, b))
}

/// Membership of a utility function in the restricted classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UtilityClassification {
    pub non_negative: bool,
    pub positive: bool,
    pub monotonic: bool,
    pub additive: bool,
    pub zero_one: bool,
    pub dichotomous: bool,
}

/// Classifies one agent's utility function.
///
/// Explicit tables are checked exhaustively over every bundle. Additive
/// representations are decided from the per-resource values, which gives the
/// same answer as the exhaustive check without touching `2^|R|` bundles.
pub fn classify_utility(scenario: &Scenario, agent: usize) -> UtilityClassification {
    let m = scenario.resource_count();
    match &scenario.utilities[agent] {
        UtilityFunction::Additive(values) => {
            let zero = Rational::ZERO;
            let one = Rational::ONE;
            let non_negative = values.iter().all(|v| *v >= zero);
            let zero_one = values.iter().all(|v| *v == zero || *v == one);
            UtilityClassification {
                non_negative,
                positive: values.iter().all(|v| *v > zero),
                monotonic: non_negative,
                additive: true,
                zero_one,
                dichotomous: zero_one && values.iter().filter(|v| **v == one).count() <= 1,
            }
        }
        UtilityFunction::Explicit(table) => classify_table(table, m),
    }
}

fn classify_table(table: &[Rational], m: usize) -> UtilityClassification {
    let zero = Rational::ZERO;
    let one = Rational::ONE;
    let non_negative = table.iter().all(|v| *v >= zero);
    let positive = non_negative && table.iter().skip(1).all(|v| *v != zero);
    // Checking every covering pair R\{r} ⊂ R is enough; ≤ is transitive.
    let monotonic = (0..table.len()).all(|bits| {
        (0..m).all(|r| bits & (1 << r) == 0 || table[bits & !(1 << r)] <= table[bits])
    });
    let additive = table.iter().enumerate().all(|(bits, v)| {
        let sum: Rational = (0..m).filter(|r| bits & (1 << r) != 0).map(|r| table[1 << r]).sum();
        sum == *v
    });
    let zero_one = additive && (0..m).all(|r| table[1 << r] == zero || table[1 << r] == one);
    UtilityClassification {
        non_negative,
        positive,
        monotonic,
        additive,
        zero_one,
        dichotomous: table.iter().all(|v| *v == zero || *v == one),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::catalog;
    use alloc::vec;

    pub(crate) fn paper_3_2() -> Scenario {
        catalog::cluster_deal_example().0
    }

    #[test]
    fn explicit_lookup() {
        let s = paper_3_2();
        assert_eq!(utility_of(&s, "2", &["r1", "r2"]).unwrap(), Rational::from(8));
        assert_eq!(utility_of(&s, "1", &["r2"]).unwrap(), Rational::from(3));
        assert_eq!(utility_of(&s, "1", &[] as &[&str]).unwrap(), Rational::ZERO);
    }

    #[test]
    fn lookup_errors() {
        let s = paper_3_2();
        assert_eq!(utility_of(&s, "7", &["r1"]), Err(Error::UnknownAgent("7".into())));
        assert_eq!(utility_of(&s, "1", &["r9"]), Err(Error::UnknownResource("r9".into())));
    }

    #[test]
    fn additive_lookup_sums_singletons() {
        let (s, _) = catalog::minimal_inequality_example();
        assert_eq!(utility_of(&s, "1", &["r1", "r2"]).unwrap(), Rational::from(15));
        assert_eq!(utility_of(&s, "1", &[] as &[&str]).unwrap(), Rational::ZERO);
    }

    #[test]
    fn classification_of_worked_examples() {
        let (s, _) = catalog::minimal_inequality_example();
        let c = classify_utility(&s, 0);
        assert!(c.additive && c.monotonic && c.non_negative);
        assert!(!c.zero_one && !c.dichotomous && c.positive);

        let s = paper_3_2();
        let c = classify_utility(&s, 1);
        assert!(!c.additive, "3 + 3 != 8");
        assert!(c.monotonic && c.non_negative);
    }

    #[test]
    fn additive_repr_round_trips_through_explicit() {
        let values = vec![Rational::from(2), Rational::from(-1), Rational::ZERO];
        let add = UtilityFunction::Additive(values);
        let names = |p: &str, n: usize| (1..=n).map(|i| alloc::format!("{p}{i}")).collect::<Vec<_>>();
        let s1 = Scenario::new(names("", 2), names("r", 3), vec![add.clone(), add.to_explicit(3)]).unwrap();
        assert_eq!(classify_utility(&s1, 0), classify_utility(&s1, 1));
        assert!(classify_utility(&s1, 0).additive);
        assert!(!classify_utility(&s1, 0).monotonic);
    }

    #[test]
    fn zero_one_additive_with_two_ones_is_not_dichotomous() {
        let add = UtilityFunction::Additive(vec![Rational::ONE, Rational::ONE]);
        let s = Scenario::new(
            vec!["1".into(), "2".into()],
            vec!["r1".into(), "r2".into()],
            vec![add.clone(), add.to_explicit(2)],
        )
        .unwrap();
        for i in 0..2 {
            let c = classify_utility(&s, i);
            assert!(c.zero_one && !c.dichotomous);
        }
    }

    #[test]
    fn scenario_invariants_enforced() {
        let u = UtilityFunction::Additive(vec![Rational::ONE]);
        assert_eq!(
            Scenario::new(vec!["1".into()], vec!["r".into()], vec![u.clone()]),
            Err(Error::TooFewAgents(1))
        );
        assert_eq!(
            Scenario::new(vec!["1".into(), "1".into()], vec!["r".into()], vec![u.clone(), u.clone()]),
            Err(Error::DuplicateAgent("1".into()))
        );
        assert_eq!(
            Scenario::new(vec!["1".into(), "2".into()], vec![], vec![u.clone(), u.clone()]),
            Err(Error::NoResources)
        );
        let bad = UtilityFunction::Explicit(vec![Rational::ZERO; 3]);
        assert!(matches!(
            Scenario::new(vec!["1".into(), "2".into()], vec!["a".into(), "b".into()], vec![bad.clone(), bad]),
            Err(Error::UtilityTableSize { .. })
        ));
    }
}
