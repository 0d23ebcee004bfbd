//! Doc-test shim for the guide's experiments chapter, which exercises the
//! harness; the library chapters are doc-tested from the `prs` crate.

#[doc = include_str!("../../../book/src/experiments.md")]
pub struct Experiments;
