//! Inference on the planted ranked subgraph (PRS) model.
//!
//! A hidden community inside a random directed graph carries a latent
//! ranking: edges between community members point toward the better-ranked
//! endpoint a little more often than not, while edge *density* is the same
//! everywhere. This crate implements the model end-to-end:
//!
//! * [`model`] — exact samplers for the null and planted distributions;
//! * [`metrics`] — rankings, Hamming/Kendall-tau distances, the alignment
//!   objective;
//! * [`detect`] — hypothesis tests (degree-2 count statistic, spectral
//!   statistic, exhaustive search statistic);
//! * [`spectral`] — power-iteration eigensolver for the Hermitian matrix
//!   `iY` and the analytic spectrum of the full ordering matrix;
//! * [`recover`] — Ranking By Wins, spectral community/ranking recovery,
//!   ordered-clique recovery, and exact brute-force search;
//! * [`lowdeg`] — exact small-instance oracles: planted monomial
//!   expectations, the low-degree advantage, chi-squared divergence, and the
//!   inversion moment generating function;
//! * [`io`] — plain-text graph/instance/estimate files.
//!
//! Everything is deterministic given a 64-bit seed ([`rng`]); same seed,
//! same bytes, on every platform.
//!
//! The `book/` directory of the repository walks through the model and each
//! algorithm with runnable examples; its code blocks compile and run as this
//! crate's doc-tests.

pub mod detect;
pub mod io;
pub mod lowdeg;
pub mod metrics;
pub mod model;
pub mod recover;
pub mod rng;
pub mod spectral;

#[cfg(doctest)]
mod book;
