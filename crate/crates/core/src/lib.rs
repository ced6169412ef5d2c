//! Core algorithms for clustering regional GDP sector indicators.
//!
//! The crate is `no_std` and only needs `alloc`. It covers feature
//! derivation from sector panels ([`dataset`]), the Klassen quadrant rule
//! ([`klassen`]), a Kohonen self-organizing map ([`som`]), a Gaussian naive
//! Bayes classifier ([`bayes`]) and the pseudo-labeling pipeline that chains
//! them together with agreement metrics ([`pipeline`]).
//!
//! File formats, model documents and the command line live in the `gdpsom`
//! companion crate.
#![no_std]
#![forbid(unsafe_code)]
// NaN-rejecting checks read as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bayes;
pub mod dataset;
mod error;
pub mod klassen;
pub mod pipeline;
pub mod som;
mod stats;

pub use error::{Error, Result};
