//! Exact enumeration workbench for the stability of patterns on permutations
//! of multisets.
//!
//! A pattern is *stable* when the distribution of its occurrence count over
//! the permutations of a multiset does not change when the multiplicities are
//! permuted among the letters. This crate counts occurrences of classical,
//! consecutive and vincular patterns, implements the run-reversal bijections
//! that witness stability, constructs instability witnesses, and checks the
//! ascent-number recurrences and generating functions that stability makes
//! available.

pub mod bijection;
pub mod cache;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod eulerian;
pub mod extend;
pub mod multiset;
pub mod pattern;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod stability;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

pub use distribution::{distribution, Distribution};
pub use error::{Error, Result};
pub use multiset::{apply_sigma, Multiset, Transposition, Word};
pub use pattern::{avoids, count_occurrences, format_pattern, parse_pattern, Pattern};
pub use scalar::{Field, Scalar};

/// Exact count of words.
pub type Count = BigUint;

/// Truncated power series with exact rational coefficients.
pub type RationalSeries = series::TruncatedSeries<BigRational>;
/// Truncated power series with `f64` coefficients, for quick numeric probes.
pub type F64Series = series::TruncatedSeries<f64>;
/// Sparse multivariate polynomial with exact integer coefficients.
pub type IntPoly = poly::Poly<BigInt>;
/// Eulerian triangle over exact integers.
pub type EulerianTable = eulerian::EulerTriangle<BigInt>;
/// `A_{m,k,s}` table over exact integers.
pub type ATable = eulerian::AscentTable<BigInt>;

/// Ceiling on the number of words a single enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_words: u64,
}

impl Budget {
    pub const DEFAULT_WORDS: u64 = 10_000_000;

    pub fn new(max_words: u64) -> Self {
        Budget { max_words }
    }

    pub fn unlimited() -> Self {
        Budget {
            max_words: u64::MAX,
        }
    }

    pub fn check(&self, needed: &BigUint) -> Result<()> {
        if *needed > BigUint::from(self.max_words) {
            Err(Error::BudgetExceeded {
                needed: needed.to_string(),
                budget: self.max_words,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_WORDS)
    }
}
