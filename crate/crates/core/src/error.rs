use alloc::string::String;

use crate::rational::ParseRationalError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("a scenario needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("a scenario needs at least one resource")]
    NoResources,
    #[error("too many resources: {got} (limit {limit})")]
    TooManyResources { got: usize, limit: usize },
    #[error("duplicate agent identifier `{0}`")]
    DuplicateAgent(String),
    #[error("duplicate resource identifier `{0}`")]
    DuplicateResourceId(String),
    #[error("expected one utility function per agent ({expected}), got {got}")]
    UtilityCountMismatch { expected: usize, got: usize },
    #[error("utility table of agent `{agent}` has {got} entries, expected {expected}")]
    UtilityTableSize { agent: String, expected: usize, got: usize },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown resource `{0}`")]
    UnknownResource(String),
    #[error("resource `{0}` assigned more than once")]
    DuplicateResource(String),
    #[error("resource `{0}` is not assigned to any agent")]
    MissingResource(String),
    #[error("agent `{0}` missing from allocation")]
    MissingAgent(String),
    #[error("allocation has {got} bundles but the scenario has {expected} agents")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("a deal needs two distinct allocations")]
    NotADeal,
    #[error("cannot compose: first deal does not end where the second begins")]
    MidpointMismatch,
    #[error("composition returns to its starting allocation")]
    DegenerateComposition,
    #[error("deal does not strictly increase utilitarian social welfare")]
    NotIndividuallyRational,
    #[error("payments sum to {0}, not zero")]
    PaymentsDoNotBalance(crate::Rational),
    #[error("{allocations} allocations exceed the enumeration limit of {limit}")]
    TooLarge { allocations: u128, limit: u128 },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("deal is independently decomposable")]
    DecomposableDeal,
    #[error("epsilon must satisfy 0 < eps < 1, got {0}")]
    EpsilonOutOfRange(crate::Rational),
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}
