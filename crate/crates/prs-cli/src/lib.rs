//! Library half of the experiment harness: sweep configuration, single
//! trials, and the sweep runner. The `prs` binary is a thin layer over this.

#[cfg(doctest)]
mod book;
pub mod config;
pub mod sweep;
pub mod trial;
