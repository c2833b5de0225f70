use thiserror::Error;

/// Errors raised by the library. Every variant corresponds to a violated
/// precondition; none of the computations fail on valid input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is outside the supported range (must be below {limit})")]
    OutOfRange { value: u64, limit: u64 },

    #[error("{}", not_odd_prime(*.0))]
    NotOddPrime(u64),

    #[error("argument must be nonzero modulo {p}")]
    ZeroArgument { p: u64 },

    #[error("p = {p} exceeds the cost cap {cap} of this evaluation")]
    CostCap { p: u64, cap: u64 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("numerical tolerance exceeded: {0}")]
    Tolerance(String),

    /// Euler's criterion produced something other than 0, 1 or p - 1, which
    /// can only happen for a composite modulus.
    #[error("u^((p-1)/2) = {value} modulo {p} is not a sign")]
    NotASign { value: u64, p: u64 },
}

fn not_odd_prime(n: u64) -> String {
    if n == 2 {
        "2 is even; an odd prime is required".into()
    } else {
        format!("{n} is not prime")
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
