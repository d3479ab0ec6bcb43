//! Finite-truncation analysis of sequence-space norms, matrix-attached
//! vector measures, and factorization constants of the induced operators.
//!
//! The crate has three layers:
//!
//! * [`seqspace`]: (quasi-)norms on finitely supported sequences: ℓ^q,
//!   weighted ℓ^q, pointwise powers, sums, and intersections.
//! * [`matop`] and [`vmeasure`]: infinite matrices as entry generators, the
//!   set function A ↦ M·χ_A they induce, and the L¹/L^p norms attached to it.
//! * [`factor`]: factorization and domination constants of the operator at a
//!   truncation scale, with growth diagnostics over a truncation schedule.
//!
//! Every estimation routine is paired with an independent brute-force
//! reference in [`oracle`], and [`verify`] bundles the cross-checks into a
//! runnable suite.
//!
//! Randomized searches all derive their streams from one global 64-bit seed,
//! and parallel reductions are deterministic, so results are reproducible
//! bit-for-bit with or without the `parallel` feature.

pub mod error;
pub mod estimate;
pub mod exec;
pub mod growth;
pub mod factor;
pub mod matop;
pub mod oracle;
pub mod rng;
pub mod seqspace;
pub mod util;
pub mod vector;
pub mod verify;
pub mod vmeasure;

pub use error::{Error, Result};
pub use estimate::{EstimateMethod, NormEstimate};
pub use vector::FiniteVector;
