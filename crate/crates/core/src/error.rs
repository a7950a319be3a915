use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(String, String),
    #[error("not a unit: valuation {0}")]
    NonUnit(i64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point leaves the domain: {0}")]
    DomainViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("characteristic obstruction: char {p} <= order {n}")]
    CharacteristicObstruction { p: u32, n: usize },
    #[error("empty sampler")]
    EmptySampler,
    #[error("identity mismatch: {0}")]
    Mismatch(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("divergent tail: {0}")]
    DivergentTail(String),
    #[error("map is not well defined at level {level}: {detail}")]
    NotWellDefined { level: u32, detail: String },
    #[error("map is not bijective at level {level}: {detail}")]
    NotBijective { level: u32, detail: String },
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("inversion failed: {0}")]
    InversionFailed(String),
    #[error("ball not preserved: {0}")]
    BallNotPreserved(String),
    #[error("odd permutation")]
    OddParity,
    #[error("too few points: {0} < 5")]
    TooSmall(usize),
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("basepoint violated: {0}")]
    BasepointViolated(String),
    #[error("capacity exceeded: {size} > {cap}")]
    CapacityExceeded { size: usize, cap: usize },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
