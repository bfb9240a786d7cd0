//! Cyclic shuffles of a deck driven by random transpositions.
//!
//! Two shuffles of an `n`-card deck are modelled, both made of exactly `n`
//! transpositions. The *card cyclic* shuffle, on step `j`, swaps the card
//! numbered `j` with a uniformly random card (possibly itself). The
//! *position cyclic* shuffle, on step `j`, swaps whatever card sits in
//! position `j` with a uniformly random position (possibly itself). The
//! cyclic insertion shuffle is included for comparison.
//!
//! The crate is organised around the engines that analyse these shuffles:
//!
//! - [`perm`]: permutations, the step semantics of every shuffle kind and
//!   seeded sampling from a keyed counter-based generator.
//! - [`exact`]: closed-form single-card marginals, a brute-force oracle over
//!   all `n^n` choice sequences and an exact distribution-evolution engine.
//! - [`limits`]: the limiting rescaled densities, their extrema, the
//!   expectation curves and the total-variation lower bound.
//! - [`mc`]: reproducible Monte Carlo estimates for large decks.
//! - [`cli`]: the batch command-line front end.
//!
//! All public indices are 1-based: positions and card numbers run over
//! `1..=n`.

pub mod cli;
pub mod error;
pub mod exact;
pub mod limits;
pub mod mc;
pub mod par;
pub mod perm;

pub use error::{Error, Result};
pub use perm::{ChoiceSequence, Permutation, ShuffleKind};
