//! Quadratic residues over prime fields: exact pattern censuses, complete and
//! incomplete character sums, and least-nonresidue statistics.

pub mod census;
pub mod charsum;
pub mod error;
pub mod expsums;
pub mod modcore;
pub mod nonresidue;
pub mod report;
pub mod symbol;

pub use error::{Error, Result};
pub use modcore::{is_prime, primes_in, PrimeModulus, PrimeRange, SquareRoots};
pub use symbol::{euler_criterion, legendre, Symbol};

// Book chapters, compiled as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/residues.md")]
    mod residues {}
    #[doc = include_str!("../../../book/src/exponential-sums.md")]
    mod exponential_sums {}
    #[doc = include_str!("../../../book/src/census.md")]
    mod census {}
    #[doc = include_str!("../../../book/src/nonresidue.md")]
    mod nonresidue {}
    #[doc = include_str!("../../../book/src/charsum.md")]
    mod charsum {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
