//! Isolated correction of non-word spelling errors.
//!
//! Five families of correctors share one candidate type and one
//! evaluation harness:
//!
//! * dictionary search by Levenshtein distance ([`lexicon`], [`editdist`]),
//! * diacritic swapping over Polish letters ([`diacritics`]),
//! * re-ranking by the mean of scaled edit distance and cosine distance of
//!   word vectors ([`embeddings`]),
//! * character LSTM encoder-decoders, one- or two-directional, optionally
//!   initialized from external per-token layer vectors ([`neural`]).
//!
//! [`corpus`], [`metrics`] and [`pipeline`] run any of them over an
//! error/correction corpus and report accuracy, perplexity and loss.

pub mod candidate;
#[cfg(feature = "cli")]
pub mod cli;
pub mod corpus;
pub mod diacritics;
pub mod editdist;
pub mod embeddings;
pub mod error;
pub mod fixtures;
pub mod lexicon;
pub mod metrics;
pub mod neural;
pub mod pipeline;

pub use candidate::{CorrectionCandidate, Source};
pub use error::{Error, Result};
pub use lexicon::Lexicon;
