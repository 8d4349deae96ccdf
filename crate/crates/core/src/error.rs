use thiserror::Error;

/// Group axiom that failed validation of a Cayley table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Closure,
    LatinRow,
    LatinColumn,
    Identity,
    Inverse,
    Associativity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Axiom::Closure => "closure",
            Axiom::LatinRow => "latin-row",
            Axiom::LatinColumn => "latin-column",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
            Axiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a group: {axiom} fails at ({}, {}, {})", witness[0], witness[1], witness[2])]
    NotAGroup { axiom: Axiom, witness: [usize; 3] },
    #[error("group order {order} exceeds limit {limit}")]
    OrderExceedsLimit { order: usize, limit: usize },
    #[error("unsupported group name `{0}`")]
    UnsupportedName(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("character table: degenerate spectrum after {retries} attempts")]
    DegenerateSpectrum { retries: usize },
    #[error("character table validation failed: {0}")]
    CharacterTableInvalid(String),
    #[error("canonical basis check `{check}` failed: residual {residual:e} > tolerance {tolerance:e}")]
    IdempotencyCheckFailed {
        check: &'static str,
        residual: f64,
        tolerance: f64,
    },
    #[error("reconstruction from canonical coordinates failed: residual {residual:e}")]
    ReconstructionFailed { residual: f64 },
    #[error("series caps differ")]
    CapMismatch,
    #[error("lambda exponent {exponent} below representable floor {floor}")]
    GenusUnderflow { exponent: i32, floor: i32 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("basis change matrix is singular")]
    SingularMatrix,
    #[error("descendant level {level} exceeds level cap {cap}")]
    LevelCapExceeded { level: u32, cap: u32 },
    #[error("enumeration work {work} exceeds cap {cap}")]
    WorkCapExceeded { work: u128, cap: u128 },
    #[error("unstable correlator: genus {genus} with {points} insertions")]
    UnstableKey { genus: u32, points: usize },
    #[error("variable system mismatch: {0}")]
    VariableSystemMismatch(String),
    #[error("deviation {deviation:e} exceeds tolerance {tolerance:e} at {monomial}")]
    ToleranceExceeded {
        deviation: f64,
        tolerance: f64,
        monomial: String,
    },
}

impl Error {
    /// Errors caused by a configured resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::OrderExceedsLimit { .. } | Error::WorkCapExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
