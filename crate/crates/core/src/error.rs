use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis columns are rationally dependent")]
    RankDeficient,
    #[error("lattice is not orthogonal to the all-ones vector")]
    NotHomogeneous,
    #[error("ambient dimension {0} is too small (need at least 3)")]
    AmbientTooSmall(usize),
    #[error("ambient dimension {0} exceeds the supported maximum of 64")]
    AmbientTooLarge(usize),
    #[error("matrix has the wrong rank: expected {expected}, found {found}")]
    WrongRank { expected: usize, found: usize },
    #[error("columns have mismatched lengths")]
    DimensionMismatch,
    #[error("entry {0} exceeds the supported magnitude 2^20")]
    EntryTooLarge(i128),
    #[error("arithmetic overflow in fixed-width fast path")]
    Overflow,
    #[error("polyhedron {{u : Bu <= a}} is unbounded")]
    Unbounded,
    #[error("right-hand side must be nonnegative")]
    NegativeDegree,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("operation requires a lattice ideal that is not a complete intersection")]
    PreconditionCI,
    #[error("operation requires a lattice ideal that is not Cohen-Macaulay")]
    PreconditionCM,
    #[error("operation requires a Cohen-Macaulay lattice ideal")]
    PreconditionNotCM,
    #[error(
        "operation requires a Cohen-Macaulay lattice ideal that is not a complete intersection"
    )]
    PreconditionNotCMnonCI,
    #[error("Gale diagram does not meet all four open quadrants")]
    NotAllQuadrants,
    #[error("vectors of the chosen opposite quadrant pair do not sum to zero")]
    PreconditionUnbalancedPair,
    #[error("reduction datum is not perfectly balanced")]
    PreconditionNotBalanced,
    #[error("reduction datum does not have the line-plus-simple shape")]
    PreconditionShape,
    #[error("Koszul degrees must be at least 2 (degree-one generator signals degeneracy)")]
    DegreeOne,
    #[error("at least one generator degree is required")]
    NoGenerators,
    #[error("lattice is not saturated (index {0})")]
    NotSaturated(i64),
    #[error("lattice ideal is degenerate: e_{0} - e_{1} lies in the lattice")]
    Degenerate(usize, usize),
    #[error("exponent sequence must start at 0 and be strictly increasing")]
    NotIncreasing,
    #[error("exponents have gcd {0}, expected 1")]
    GcdNotOne(i64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("Gale diagram vectors must sum to zero")]
    GaleNotBalanced,
}
