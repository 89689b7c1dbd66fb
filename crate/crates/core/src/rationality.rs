//! Acceptability criteria for deals and side payments.
//!
//! Every criterion is local: apart from the structural 1-deal requirement of
//! the simple Pareto-Pigou-Dalton class, it is decided from the triples
//! `(agent, u_i(A), u_i(A'))` of the agents whose bundle changes.

use alloc::vec::Vec;
use core::fmt;

use crate::deal::Deal;
use crate::rational::Rational;
use crate::scenario::Scenario;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Some zero-sum side payment leaves every agent strictly better off.
    IndividuallyRational,
    /// Nobody loses, somebody gains; no money involved.
    CooperativelyRational,
    /// The weakest involved agent ends up strictly better off.
    Equitable,
    /// Two agents, utility sum preserved, their gap strictly shrinks.
    PigouDalton,
    /// A 1-deal that is cooperatively rational or a Pigou-Dalton transfer.
    SimpleParetoPigouDalton,
    /// The best-off involved agent ends up strictly better off. Experimental:
    /// no convergence guarantee is claimed for it.
    Elitist,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::IndividuallyRational,
        Criterion::CooperativelyRational,
        Criterion::Equitable,
        Criterion::PigouDalton,
        Criterion::SimpleParetoPigouDalton,
        Criterion::Elitist,
    ];

    /// Decides the utility part of the criterion from the involved agents'
    /// local changes. Does not check the 1-deal requirement of
    /// [`Criterion::SimpleParetoPigouDalton`].
    pub fn holds_on(self, changes: &[LocalChange], options: AdmissibilityOptions) -> bool {
        if changes.is_empty() {
            return false;
        }
        match self {
            // Equivalent to a strict rise in the utilitarian sum.
            Criterion::IndividuallyRational => {
                changes.iter().map(|c| c.after - c.before).sum::<Rational>() > Rational::ZERO
            }
            Criterion::CooperativelyRational => {
                changes.iter().all(|c| c.before <= c.after) && changes.iter().any(|c| c.before < c.after)
            }
            Criterion::Equitable => min_of(changes, |c| c.before) < min_of(changes, |c| c.after),
            Criterion::PigouDalton => pigou_dalton(changes, options.relaxed_mean_preservation),
            Criterion::SimpleParetoPigouDalton => {
                Criterion::CooperativelyRational.holds_on(changes, options)
                    || pigou_dalton(changes, options.relaxed_mean_preservation)
            }
            Criterion::Elitist => max_of(changes, |c| c.before) < max_of(changes, |c| c.after),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::IndividuallyRational => "ir",
            Criterion::CooperativelyRational => "cr",
            Criterion::Equitable => "equitable",
            Criterion::PigouDalton => "pigou-dalton",
            Criterion::SimpleParetoPigouDalton => "ppd",
            Criterion::Elitist => "elitist",
        })
    }
}

fn min_of(changes: &[LocalChange], f: impl Fn(&LocalChange) -> Rational) -> Rational {
    changes.iter().map(f).min().expect("nonempty")
}

fn max_of(changes: &[LocalChange], f: impl Fn(&LocalChange) -> Rational) -> Rational {
    changes.iter().map(f).max().expect("nonempty")
}

fn pigou_dalton(changes: &[LocalChange], relaxed: bool) -> bool {
    let [i, j] = changes else { return false };
    let sum_before = i.before + j.before;
    let sum_after = i.after + j.after;
    let mean_ok = if relaxed { sum_before <= sum_after } else { sum_before == sum_after };
    mean_ok && (i.after - j.after).abs() < (i.before - j.before).abs()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AdmissibilityOptions {
    /// Pigou-Dalton transfers may increase the pair's utility sum instead of
    /// preserving it exactly.
    pub relaxed_mean_preservation: bool,
}

/// `(agent, u_i(A), u_i(A'))` for one involved agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalChange {
    pub agent: usize,
    pub before: Rational,
    pub after: Rational,
}

pub fn local_changes(scenario: &Scenario, deal: &Deal) -> Vec<LocalChange> {
    deal.involved_agents()
        .into_iter()
        .map(|agent| LocalChange {
            agent,
            before: scenario.utility_in(agent, deal.before()),
            after: scenario.utility_in(agent, deal.after()),
        })
        .collect()
}

pub fn is_admissible(scenario: &Scenario, deal: &Deal, criterion: Criterion) -> bool {
    is_admissible_with(scenario, deal, criterion, AdmissibilityOptions::default())
}

pub fn is_admissible_with(
    scenario: &Scenario,
    deal: &Deal,
    criterion: Criterion,
    options: AdmissibilityOptions,
) -> bool {
    if criterion == Criterion::SimpleParetoPigouDalton && !deal.is_one_deal() {
        return false;
    }
    criterion.holds_on(&local_changes(scenario, deal), options)
}

/// Side payments: positive means the agent pays, negative means it receives.
/// Always balanced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PaymentFunction(Vec<Rational>);

impl PaymentFunction {
    pub fn new(payments: Vec<Rational>) -> Result<Self> {
        let total: Rational = payments.iter().sum();
        if !total.is_zero() {
            return Err(Error::PaymentsDoNotBalance(total));
        }
        Ok(PaymentFunction(payments))
    }

    pub fn zero(agent_count: usize) -> Self {
        PaymentFunction(alloc::vec![Rational::ZERO; agent_count])
    }

    pub fn payments(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, agent: usize) -> Rational {
        self.0[agent]
    }
}

/// The payment that spreads the welfare surplus equally over all agents:
/// `p(i) = (u_i(A') - u_i(A)) - (sw_u(A') - sw_u(A)) / |A|`.
pub fn witness_payment(scenario: &Scenario, deal: &Deal) -> Result<PaymentFunction> {
    let gains: Vec<Rational> = (0..scenario.agent_count())
        .map(|i| scenario.utility_in(i, deal.after()) - scenario.utility_in(i, deal.before()))
        .collect();
    let surplus: Rational = gains.iter().sum();
    if surplus <= Rational::ZERO {
        return Err(Error::NotIndividuallyRational);
    }
    let share = surplus / Rational::from(scenario.agent_count());
    PaymentFunction::new(gains.into_iter().map(|g| g - share).collect())
}

/// Checks a payment function against the deal: balanced, and every agent's
/// utility gain strictly exceeds its payment. Agents outside the deal may
/// instead pay nothing.
pub fn validate_payment(scenario: &Scenario, deal: &Deal, payment: &PaymentFunction) -> bool {
    let n = scenario.agent_count();
    if payment.payments().len() != n || !payment.payments().iter().sum::<Rational>().is_zero() {
        return false;
    }
    (0..n).all(|i| {
        let gain = scenario.utility_in(i, deal.after()) - scenario.utility_in(i, deal.before());
        let p = payment.get(i);
        gain > p || (!deal.involves(i) && p.is_zero())
    })
}
