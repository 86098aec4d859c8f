use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WallxError {
    #[error("morphisms are not composable: {0}")]
    NonComposable(String),
    #[error("degree {0:?} violates the root condition")]
    RootViolation(Vec<i64>),
    #[error("operands live in different algebra contexts: {0}")]
    ContextMismatch(String),
    #[error("matrix sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("odd half-power of L cannot be specialized at q = {q} (not a perfect square)")]
    OddHalfPower { q: u64 },
    #[error("matrix exponential did not terminate within {0} steps")]
    NotNilpotent(usize),
    #[error("central charge vanishes on {0:?}")]
    DegenerateCharge(Vec<i64>),
    #[error("non-commuting classes {0:?} and {1:?} share a phase")]
    PhaseCollision(Vec<i64>, Vec<i64>),
    #[error("central charge vanishes on support element {0:?}")]
    ZeroCharge(Vec<i64>),
    #[error("no such morphism: {0}")]
    NoSuchMorphism(String),
    #[error("term {0} carries a nonzero shift")]
    ShiftedTerm(String),
    #[error("dimension cutoff exceeded: {0}")]
    CutoffExceeded(String),
    #[error("f takes equal values at {0} and {1}")]
    DegenerateF(usize, usize),
    #[error("point lies on a dividing line ({0})")]
    BoundaryAmbiguity(String),
    #[error("semistable phase {0} sits on an interval endpoint")]
    EndpointPhase(String),
    #[error("generators must be linearly independent: {0}")]
    DependentGenerators(String),
    #[error("charges do not lie in a common strict sector")]
    NotStrict,
    #[error("classifier and oracle disagree at {0}")]
    OracleDisagreement(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, WallxError>;
