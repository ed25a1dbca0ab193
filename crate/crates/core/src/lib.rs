//! Overlap of generalized cat states with their displaced copies.
//!
//! A cat state superposes `n` coherent states spaced evenly on a circle of
//! radius `|α|`. Its overlap with a displaced copy,
//! `⟨cat|D(δ)|cat⟩`, vanishes first at `|δ| ≈ C/(2|α|)` for large `n`,
//! where `C` is the first zero of `J0`. This crate computes that overlap
//! exactly and at each approximation tier, checks it against a brute-force
//! number-basis oracle, evaluates the Wigner function that carries the
//! underlying interference pattern, and produces the curves behind the
//! convergence and off-diagonal studies.
//!
//! Heavy loops run through [`parallel::map_ordered`]; with the `parallel`
//! feature disabled everything runs sequentially and gives identical bits.

pub mod analysis;
pub mod error;
pub mod oracle;
pub mod overlap;
pub mod parallel;
pub mod specfun;
pub mod states;
pub mod sum;
pub mod wigner;

pub use error::{Error, Result};
pub use overlap::{Envelope, OverlapResult, SumMask, Tier};
pub use parallel::Exec;
pub use states::{CatStateSpec, ComplexAmplitude, Convention, Displacement};
