//! Permutation limits.
//!
//! Subpermutation densities of finite permutations, permutons (limit
//! permutations) given by step densities, Z-random permutations sampled from
//! them, rectangular and sup distances, Cooper discrepancy, and finite-prefix
//! convergence diagnostics for permutation sequences.
//!
//! Exact quantities are [`Rational`]s; floating point is used only for
//! sampling and for large-scale approximations that carry an explicit error
//! envelope.
//!
//! ```
//! use permlimit::{occurrences, density, Permutation};
//!
//! let pi: Permutation = "5 6 2 4 7 1 3".parse().unwrap();
//! let tau: Permutation = "3 1 4 2".parse().unwrap();
//! assert!(occurrences(&tau, &pi) >= 1);
//! assert!(density(&tau, &pi) > permlimit::rational::zero());
//! ```

pub mod convergence;
pub mod density;
mod error;
mod fenwick;
pub mod metrics;
pub mod perm;
pub mod permuton;
pub mod rational;
pub mod rng;
pub mod sampling;

pub use crate::error::{Error, ErrorKind, Result};
pub use crate::perm::{
    density, occurrences, parse_permutation, pattern_distribution, random_subpermutation, PatternDistribution,
    Permutation,
};
pub use crate::permuton::{uniform_permuton, AnyPermuton, GridPermuton, Permuton, UniformPermuton};
pub use crate::rational::Rational;
