//! Negotiation dynamics: list the admissible deals from the current
//! allocation, pick one by policy, repeat until nothing is admissible.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::{Allocation, AllocationIter};
use crate::deal::{classify_deal, decompose, Deal};
use crate::rationality::{is_admissible_with, witness_payment, AdmissibilityOptions, Criterion, PaymentFunction};
use crate::scenario::Scenario;
use crate::welfare::{lorenz_compare_vectors, snapshot, LorenzRelation, WelfareSnapshot};
use crate::{Error, Result};

/// Exhaustive enumeration is refused above this many allocations.
pub const MAX_ALLOCATIONS: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum StructuralFilter {
    /// Combined deals: no structural restriction.
    #[default]
    Any,
    OneDeal,
    Swap,
    Cluster,
    NotIndependentlyDecomposable,
}

impl StructuralFilter {
    pub fn matches(self, deal: &Deal) -> bool {
        match self {
            StructuralFilter::Any => true,
            StructuralFilter::OneDeal => deal.is_one_deal(),
            StructuralFilter::Swap => classify_deal(deal).is_swap,
            StructuralFilter::Cluster => classify_deal(deal).is_cluster,
            StructuralFilter::NotIndependentlyDecomposable => decompose(deal).is_none(),
        }
    }
}

impl fmt::Display for StructuralFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructuralFilter::Any => "any",
            StructuralFilter::OneDeal => "one-deal",
            StructuralFilter::Swap => "swap",
            StructuralFilter::Cluster => "cluster",
            StructuralFilter::NotIndependentlyDecomposable => "not-decomposable",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    #[default]
    UniformRandom,
    FirstInCanonicalOrder,
    /// Best resulting allocation under the criterion's own progress order,
    /// ties to the canonically first.
    GreedyWelfareGain,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::UniformRandom => "random",
            PolicyKind::FirstInCanonicalOrder => "first",
            PolicyKind::GreedyWelfareGain => "greedy",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Policy {
    pub kind: PolicyKind,
    pub seed: u64,
}

impl Policy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Policy { kind, seed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NegotiationConfig {
    pub criterion: Criterion,
    pub filter: StructuralFilter,
    pub policy: Policy,
    /// Defaults to `|A|^|R|` when `None`.
    pub step_cap: Option<usize>,
    pub options: AdmissibilityOptions,
}

impl NegotiationConfig {
    pub fn new(criterion: Criterion) -> Self {
        NegotiationConfig {
            criterion,
            filter: StructuralFilter::Any,
            policy: Policy::default(),
            step_cap: None,
            options: AdmissibilityOptions::default(),
        }
    }

    pub fn with_filter(mut self, filter: StructuralFilter) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_step_cap(mut self, cap: usize) -> Self {
        self.step_cap = Some(cap);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    NoAdmissibleDeal,
    StepCapReached,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminationReason::NoAdmissibleDeal => "no_admissible_deal",
            TerminationReason::StepCapReached => "step_cap_reached",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub deal: Deal,
    /// Present for individually rational runs.
    pub payment: Option<PaymentFunction>,
    /// Welfare after the deal.
    pub welfare: WelfareSnapshot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegotiationTrace {
    pub initial: Allocation,
    pub initial_welfare: WelfareSnapshot,
    pub steps: Vec<TraceStep>,
    pub terminal: Allocation,
    pub termination: TerminationReason,
}

impl NegotiationTrace {
    pub fn terminal_welfare(&self) -> &WelfareSnapshot {
        self.steps.last().map_or(&self.initial_welfare, |s| &s.welfare)
    }
}

pub(crate) fn check_size(scenario: &Scenario) -> Result<()> {
    let count = scenario.allocation_count();
    if count > MAX_ALLOCATIONS {
        return Err(Error::TooLarge { allocations: count, limit: MAX_ALLOCATIONS });
    }
    Ok(())
}

/// Every deal `(current, A')` passing `filter` and `criterion`, with `A'` in
/// canonical order.
pub fn enumerate_admissible(
    scenario: &Scenario,
    current: &Allocation,
    criterion: Criterion,
    filter: StructuralFilter,
) -> Result<Vec<Deal>> {
    enumerate_admissible_with(scenario, current, criterion, filter, AdmissibilityOptions::default())
}

pub fn enumerate_admissible_with(
    scenario: &Scenario,
    current: &Allocation,
    criterion: Criterion,
    filter: StructuralFilter,
    options: AdmissibilityOptions,
) -> Result<Vec<Deal>> {
    check_size(scenario)?;
    Ok(AllocationIter::new(scenario.agent_count(), scenario.resource_count())
        .filter(|target| target != current)
        .map(|target| Deal::new(current.clone(), target).expect("distinct allocations"))
        .filter(|deal| filter.matches(deal))
        .filter(|deal| is_admissible_with(scenario, deal, criterion, options))
        .collect())
}

/// Compares two snapshots by the progress order a criterion climbs.
fn greedy_better(criterion: Criterion, candidate: &WelfareSnapshot, best: &WelfareSnapshot) -> bool {
    match criterion {
        Criterion::IndividuallyRational | Criterion::CooperativelyRational => {
            candidate.utilitarian > best.utilitarian
        }
        Criterion::Equitable => candidate.ordered > best.ordered,
        Criterion::PigouDalton | Criterion::SimpleParetoPigouDalton => {
            (candidate.utilitarian, &candidate.ordered) > (best.utilitarian, &best.ordered)
        }
        Criterion::Elitist => candidate.elitist > best.elitist,
    }
}

fn select(
    scenario: &Scenario,
    mut candidates: Vec<Deal>,
    criterion: Criterion,
    kind: PolicyKind,
    rng: &mut ChaCha8Rng,
) -> Deal {
    let index = match kind {
        PolicyKind::FirstInCanonicalOrder => 0,
        PolicyKind::UniformRandom => rng.gen_range(0..candidates.len()),
        PolicyKind::GreedyWelfareGain => {
            let mut best = 0;
            let mut best_snap = snapshot(scenario, candidates[0].after());
            for (k, d) in candidates.iter().enumerate().skip(1) {
                let snap = snapshot(scenario, d.after());
                if greedy_better(criterion, &snap, &best_snap) {
                    best = k;
                    best_snap = snap;
                }
            }
            best
        }
    };
    candidates.swap_remove(index)
}

/// Runs negotiation from `initial` until no admissible deal remains or the
/// step cap is hit.
pub fn run_negotiation(
    scenario: &Scenario,
    initial: &Allocation,
    config: &NegotiationConfig,
) -> Result<NegotiationTrace> {
    check_size(scenario)?;
    let cap = config
        .step_cap
        .unwrap_or_else(|| usize::try_from(scenario.allocation_count()).unwrap_or(usize::MAX));
    let mut rng = ChaCha8Rng::seed_from_u64(config.policy.seed);
    let mut current = initial.clone();
    let mut steps = Vec::new();
    let termination = loop {
        let candidates = enumerate_admissible_with(
            scenario,
            &current,
            config.criterion,
            config.filter,
            config.options,
        )?;
        if candidates.is_empty() {
            break TerminationReason::NoAdmissibleDeal;
        }
        if steps.len() >= cap {
            break TerminationReason::StepCapReached;
        }
        let deal = select(scenario, candidates, config.criterion, config.policy.kind, &mut rng);
        let payment = match config.criterion {
            Criterion::IndividuallyRational => Some(witness_payment(scenario, &deal)?),
            _ => None,
        };
        let welfare = snapshot(scenario, deal.after());
        current = deal.after().clone();
        steps.push(TraceStep { deal, payment, welfare });
    };
    Ok(NegotiationTrace {
        initial_welfare: snapshot(scenario, initial),
        initial: initial.clone(),
        steps,
        terminal: current,
        termination,
    })
}

/// True iff the steps chain and the criterion's progress measure strictly
/// improves at every step: utilitarian sum for IR/CR, leximin order for
/// equitable deals, Lorenz domination for Pigou-Dalton style deals, and the
/// best involved agent's utility for elitist deals.
pub fn check_monotone(trace: &NegotiationTrace, criterion: Criterion) -> bool {
    let mut prev_alloc = &trace.initial;
    let mut prev = &trace.initial_welfare;
    for step in &trace.steps {
        if step.deal.before() != prev_alloc {
            return false;
        }
        let cur = &step.welfare;
        let improved = match criterion {
            Criterion::IndividuallyRational | Criterion::CooperativelyRational => {
                prev.utilitarian < cur.utilitarian
            }
            Criterion::Equitable => prev.ordered < cur.ordered,
            Criterion::PigouDalton | Criterion::SimpleParetoPigouDalton => {
                lorenz_compare_vectors(&prev.ordered, &cur.ordered) == LorenzRelation::DominatedBy
            }
            Criterion::Elitist => {
                let involved = step.deal.involved_agents();
                let best = |w: &WelfareSnapshot| involved.iter().map(|&i| w.per_agent[i]).max();
                best(prev) < best(cur)
            }
        };
        if !improved {
            return false;
        }
        prev_alloc = step.deal.after();
        prev = cur;
    }
    prev_alloc == &trace.terminal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::Rational;
    use alloc::vec;

    #[test]
    fn no_individually_rational_one_deal_from_full_holder() {
        let (s, a) = catalog::cluster_deal_example();
        let deals = enumerate_admissible(&s, &a, Criterion::IndividuallyRational, StructuralFilter::OneDeal).unwrap();
        assert!(deals.is_empty());
    }

    #[test]
    fn any_filter_admits_the_cluster_deal() {
        let (s, a) = catalog::cluster_deal_example();
        let deals = enumerate_admissible(&s, &a, Criterion::IndividuallyRational, StructuralFilter::Any).unwrap();
        // Brute force over the three alternatives: sw_u of {r1→2}=6, {r2→2}=5, {both→2}=8.
        assert_eq!(deals.len(), 1);
        assert_eq!(deals[0].after(), &Allocation::all_to(1, 2, 2));
    }

    #[test]
    fn pareto_optimal_start_has_no_cooperative_deal() {
        let (s, a) = catalog::lorenz_three_agent_example();
        let deals = enumerate_admissible(&s, &a, Criterion::CooperativelyRational, StructuralFilter::Any).unwrap();
        assert!(deals.is_empty());
    }

    #[test]
    fn cluster_example_converges_to_eight_for_every_policy() {
        let (s, a) = catalog::cluster_deal_example();
        for kind in [PolicyKind::UniformRandom, PolicyKind::FirstInCanonicalOrder, PolicyKind::GreedyWelfareGain] {
            for seed in 0..5 {
                let cfg = NegotiationConfig::new(Criterion::IndividuallyRational).with_policy(Policy::new(kind, seed));
                let trace = run_negotiation(&s, &a, &cfg).unwrap();
                assert_eq!(trace.terminal_welfare().utilitarian, Rational::from(8));
                assert_eq!(trace.termination, TerminationReason::NoAdmissibleDeal);
                assert!(check_monotone(&trace, Criterion::IndividuallyRational));
                assert!(trace.steps.iter().all(|st| st.payment.is_some()));
            }
        }
    }

    #[test]
    fn equitable_trace_reaches_egalitarian_maximum() {
        let (s, a) = catalog::equitable_past_optimum_example();
        for kind in [PolicyKind::UniformRandom, PolicyKind::FirstInCanonicalOrder, PolicyKind::GreedyWelfareGain] {
            for seed in 0..5 {
                let cfg = NegotiationConfig::new(Criterion::Equitable).with_policy(Policy::new(kind, seed));
                let trace = run_negotiation(&s, &a, &cfg).unwrap();
                // Either <5,6,8> (both to agent 1) or <5,6.5,8>; both maximize sw_e.
                assert_eq!(trace.terminal_welfare().egalitarian, Rational::from(5));
                assert!(check_monotone(&trace, Criterion::Equitable));
            }
        }
    }

    #[test]
    fn optimal_start_takes_no_steps() {
        let (s, _) = catalog::cluster_deal_example();
        let best = Allocation::all_to(1, 2, 2);
        let trace = run_negotiation(&s, &best, &NegotiationConfig::new(Criterion::IndividuallyRational)).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.termination, TerminationReason::NoAdmissibleDeal);
        assert_eq!(trace.terminal, best);
    }

    #[test]
    fn step_cap_is_recorded() {
        let (s, a) = catalog::equitable_past_optimum_example();
        let cfg = NegotiationConfig::new(Criterion::Equitable)
            .with_policy(Policy::new(PolicyKind::FirstInCanonicalOrder, 0))
            .with_step_cap(0);
        let trace = run_negotiation(&s, &a, &cfg).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.termination, TerminationReason::StepCapReached);
    }

    #[test]
    fn flat_step_is_caught() {
        let (s, a) = catalog::cluster_deal_example();
        // Hand-built step whose recorded welfare does not rise.
        let b = Allocation::from_owners(&[1, 0], 2);
        let deal = Deal::new(a.clone(), b.clone()).unwrap();
        let trace = NegotiationTrace {
            initial: a.clone(),
            initial_welfare: snapshot(&s, &a),
            steps: vec![TraceStep { deal, payment: None, welfare: snapshot(&s, &a) }],
            terminal: b,
            termination: TerminationReason::NoAdmissibleDeal,
        };
        assert!(!check_monotone(&trace, Criterion::IndividuallyRational));
    }

    #[test]
    fn runs_are_deterministic() {
        let (s, a) = catalog::three_agent_welfare_example();
        let cfg = NegotiationConfig::new(Criterion::Equitable).with_policy(Policy::new(PolicyKind::UniformRandom, 42));
        assert_eq!(run_negotiation(&s, &a, &cfg).unwrap(), run_negotiation(&s, &a, &cfg).unwrap());
    }
}
