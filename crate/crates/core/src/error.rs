use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The requested computation exceeds the configured step budget.
    #[error("budget exceeded in {what}: needs {needed} steps, limit is {limit}")]
    Budget { what: String, needed: u128, limit: u64 },

    /// Input is outside the supported size range.
    #[error("size guard: {0}")]
    Size(String),

    #[error("dimension or modulus mismatch: {0}")]
    Mismatch(String),

    /// A precondition of the operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is singular")]
    Singular,

    #[error("integer overflow in {0}")]
    Overflow(String),

    /// An exact identity that must hold did not; this indicates a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}

/// Upper limit on the number of innermost steps an enumeration may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
}

impl Budget {
    pub const DEFAULT_STEPS: u64 = 1_000_000_000;

    pub fn new(max_steps: u64) -> Self {
        Budget { max_steps }
    }

    pub fn unlimited() -> Self {
        Budget { max_steps: u64::MAX }
    }

    /// Fails with [`Error::Budget`] if `needed` exceeds the limit.
    pub fn check(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_steps as u128 {
            Err(Error::Budget {
                what: what.to_string(),
                needed,
                limit: self.max_steps,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_STEPS)
    }
}

/// `base^exp` as u128, saturating at `u128::MAX`.
pub(crate) fn pow_sat(base: u64, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
