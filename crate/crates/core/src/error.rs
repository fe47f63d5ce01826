use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Budget and certification failures are distinct variants so callers can
/// tell "ask for more digits / a bigger budget" apart from invalid input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tau must be a rational strictly between 0 and 1, got {0}")]
    InvalidTau(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("digit budget exceeded: q_{index} would need more than {max_digits} decimal digits")]
    DigitBudget { index: usize, max_digits: u32 },

    #[error("only {available} partial quotients available, {needed} needed")]
    DigitsExhausted { needed: usize, available: usize },

    #[error("undecided at depth cap {depth}: {what}")]
    Undecided { depth: usize, what: String },

    #[error("step budget exceeded: {needed} steps requested, budget is {budget}")]
    StepBudget { needed: u128, budget: u64 },

    #[error("no valid n0 up to n={max_n}: {reason}")]
    NoValidStart { max_n: usize, reason: String },

    #[error("degenerate sequence: {0}")]
    DegenerateSequence(String),

    #[error("k={k} is outside the convergent range ({reason})")]
    OutOfRange { k: String, reason: String },

    #[error("horizon {horizon} too small for factor length {k}")]
    HorizonTooSmall { k: usize, horizon: u64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
