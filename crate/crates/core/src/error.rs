use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("division by zero in Q(i, sqrt 5)")]
    DivisionByZero,

    #[error("cannot parse exact scalar component {0:?}")]
    Parse(String),

    #[error("subdivision rule self-check failed: {0}")]
    Configuration(String),

    #[error("resource limit exceeded: {what} needs {requested}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("insufficient context: {0}; raise the supertile level")]
    InsufficientContext(String),

    #[error("enumeration did not stabilize by level {level}: {previous} classes at level {} vs {current} at level {level}", level - 1)]
    NonStabilization {
        level: u32,
        previous: usize,
        current: usize,
    },

    #[error("class {key_hash} has a child whose collared class is not in the catalog")]
    UncollarableChild { key_hash: String },

    #[error("kernel of (M - 5I) has dimension {0}, expected 1")]
    KernelDimension(usize),

    #[error("patch frequency undecided at refinement budget {budget}")]
    UndecidedAtBudget { budget: u32 },

    #[error("loop is discontinuous at joint {0}")]
    Discontinuous(usize),

    #[error("sampling too coarse: argument step {step:.3} rad at sample {index}")]
    CoarseSampling { index: usize, step: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}
