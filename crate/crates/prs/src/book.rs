//! Doc-test shim: compiles the guide chapters in `book/src` as doc-tests,
//! keeping the book's code blocks and the library in sync. The experiments
//! chapter exercises the harness crate and has its shim there.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $path))]
        pub struct $name;
    };
}

chapter!(Introduction, "introduction.md");
chapter!(Sampling, "sampling.md");
chapter!(Distances, "distances.md");
chapter!(Detection, "detection.md");
chapter!(Spectral, "spectral.md");
chapter!(Recovery, "recovery.md");
chapter!(Oracles, "oracles.md");
