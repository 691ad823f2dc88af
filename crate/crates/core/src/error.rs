use crate::rational::Rational;
use crate::report::CheckReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("state names must be nonempty")]
    EmptyStateName,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state spaces are limited to {max} states, got {got}")]
    TooManyStates { got: usize, max: usize },
    #[error("atoms do not partition the state space: {0}")]
    InvalidAtoms(String),
    #[error("event {0} is not an element of this sigma-algebra")]
    AlgebraMismatch(String),
    #[error("sigma-algebra has {atoms} atoms; enumeration is capped at {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("not measurable: {0}")]
    NotMeasurable(String),
    #[error("value {value} of {what} lies outside [0,1]")]
    ValueOutOfRange { what: String, value: Rational },
    #[error("prior weights sum to {0}, expected exactly 1")]
    PriorNotNormalized(Rational),
    #[error("conditioning on the null event {0}")]
    ConditioningOnNull(String),
    #[error("operator table does not induce a possibility correspondence: {0}")]
    NotInducible(String),
    #[error("model assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("model invariant failed: {}", .0.name)]
    Invariant(Box<CheckReport>),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("inconsistent model parts: {0}")]
    Mismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
