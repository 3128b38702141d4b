//! Sentiment and emotion analytics for social-media corpora.
//!
//! The pipeline: load platform exports ([`corpus`]), normalize text
//! ([`preprocess`]), train and apply a PMI semantic-orientation model
//! ([`sentiment`]), profile emotions against a word-emotion lexicon
//! ([`emotion`]), aggregate human annotations ([`annotation`]) and build
//! the trend, evaluation and engagement reports ([`analytics`]). The
//! [`cli`] module wires these together behind the `ecosent` binary.

pub mod analytics;
pub mod annotation;
pub mod cli;
pub mod corpus;
pub mod emotion;
pub mod error;
pub mod output;
pub mod preprocess;
pub mod sentiment;

pub use error::{Error, Result};
