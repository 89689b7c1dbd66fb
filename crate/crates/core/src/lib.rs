//! Multiagent resource allocation by negotiation.
//!
//! Agents hold bundles of indivisible resources and agree on deals that move
//! an allocation to another one. This crate provides the data model
//! ([`Scenario`], [`Allocation`], [`Deal`]), the welfare measures and orderings
//! over allocations, local acceptability criteria for deals, a negotiation
//! engine that iterates admissible deals to a fixed point, an exhaustive
//! oracle over all allocations, and scenario generators including the
//! adversarial constructions that make a single deal indispensable.
//!
//! All arithmetic is exact ([`Rational`]). The crate is `no_std` and only
//! needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod allocation;
pub mod catalog;
pub mod deal;
pub mod engine;
mod error;
pub mod oracle;
pub mod rational;
pub mod rationality;
pub mod scenario;
pub mod scengen;
pub mod welfare;

pub use allocation::{validate_allocation, Allocation, Bundle};
pub use deal::{classify_deal, compose, decompose, Deal, DealStructure};
pub use engine::{
    check_monotone, enumerate_admissible, enumerate_admissible_with, run_negotiation, NegotiationConfig, NegotiationTrace,
    Policy, PolicyKind, StructuralFilter, TerminationReason, TraceStep,
};
pub use error::Error;
pub use oracle::{compute_optima, enumerate_allocations, OptimaReport, Optimum};
pub use rational::Rational;
pub use rationality::{
    is_admissible, is_admissible_with, local_changes, validate_payment, witness_payment, AdmissibilityOptions,
    Criterion, LocalChange, PaymentFunction,
};
pub use scenario::{classify_utility, utility_of, Scenario, UtilityClassification, UtilityFunction};
pub use scengen::{
    derive_seed, generate, necessity_construction, random_allocation, random_deal, GeneratorSpec,
    NecessityInstance, NecessityVariant, PredictedWelfare, SimRng, UtilityClass,
};
pub use welfare::{
    envy_report, leximin_compare, lorenz_compare, lorenz_compare_vectors, pareto_improves,
    snapshot, EnvyReport, LorenzRelation, OrderedUtilityVector, WelfareSnapshot,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
