//! Scenario runner, counterexample gallery and verification suites on top of
//! `wmcs_core`.
//!
//! A scenario is a JSON file naming one analysis (`kind`) and its literal
//! inputs (`payload`). Running it produces a [`report::Report`]: named
//! verdicts, witnesses, optional CSV tables and a provenance block that makes
//! the output a pure function of the scenario bytes and the seed.

pub mod gallery;
pub mod report;
pub mod scenario;
pub mod verify;

use thiserror::Error;
use wmcs_core::Limits;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] wmcs_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for malformed input, 3 for exceeded caps, 4 for unmet hypotheses,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        use wmcs_core::Error as E;
        match self {
            CliError::Schema(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::UnknownGalleryName(_)
                | E::Invalid(_)
                | E::UnknownLabel(_)
                | E::DuplicateLabel(_)
                | E::Cycle(..)
                | E::RuleDomain(_)
                | E::InfeasibleCapacity(_)
                | E::Allocation(_)
                | E::NotLattice
                | E::MissingJoin(..)
                | E::EmptyDomain => 2,
                E::SizeLimit { .. } | E::BudgetExceeded { .. } => 3,
                E::Hypothesis(_) | E::DemandAxiomViolation { .. } | E::NotInXPlus(_) => 4,
                E::TheoremViolation(_) => 1,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Environment variable that overrides the element cap of every scenario.
pub const MAX_ELEMENTS_VAR: &str = "WMCS_MAX_ELEMENTS";

/// Applies `WMCS_MAX_ELEMENTS` to `limits`, if set.
pub fn env_limits(mut limits: Limits) -> Result<Limits> {
    if let Ok(v) = std::env::var(MAX_ELEMENTS_VAR) {
        limits.max_elements = v
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("{MAX_ELEMENTS_VAR} must be a positive integer, got {v:?}")))?;
    }
    Ok(limits)
}
