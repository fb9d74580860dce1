//! Exact computation of Schubert coefficients and their stretched versions.
//!
//! The pipeline runs from pipe dreams through ladder-sequence encodings to
//! parametric linear-inequality systems whose signed lattice-point counts give
//! the coefficients, with a fitter that detects eventual quasi-polynomial
//! behavior in the resulting integer sequences.

pub mod ladderseq;
pub mod permutations;
pub mod pipedreams;
pub mod polytopes;
pub mod quasipoly;
pub mod schubert;

pub use permutations::{LehmerCode, Permutation};
pub use pipedreams::{PipeDream, WeightVector};
