use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle through {0} and {1}")]
    Cycle(String, String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("{what} has {size} elements, above the cap of {cap}")]
    SizeLimit {
        what: String,
        size: usize,
        cap: usize,
    },
    #[error("join or meet of {0} and {1} does not exist")]
    MissingJoin(String, String),
    #[error("the ground set is not a lattice")]
    NotLattice,
    #[error("maximization over an empty set")]
    EmptyDomain,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("budget exhausted after {checked} of {total} cases")]
    BudgetExceeded { checked: u64, total: u64 },
    #[error("starting point {0} admits no comparable move")]
    NotInXPlus(String),
    #[error("invariant broken: {0}")]
    TheoremViolation(String),
    #[error("unknown gallery instance {0:?}")]
    UnknownGalleryName(String),
    #[error("demand condition {axiom} fails at {at}")]
    DemandAxiomViolation { axiom: String, at: String },
    #[error("malformed choice rule: {0}")]
    RuleDomain(String),
    #[error("not an allocation: worker {0} holds several contracts")]
    Allocation(String),
    #[error("feasible vector {0} exceeds capacities")]
    InfeasibleCapacity(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
