//! Dynamical models of the fibers of an arithmetic surface.
//!
//! The library builds subshifts of finite type from free (Schottky) group
//! data and from the dual graphs of degenerating curves, computes the
//! filtered (co)homology of the associated mapping tori with exact integer
//! arithmetic, represents Cuntz-Krieger families on finite filtration
//! levels over real quadratic coefficients, models the spectra of the
//! grading (Dirac) operators, and evaluates zeta-regularized determinants
//! that reproduce local L-factors at archimedean and split-degenerate
//! places.
//!
//! The `arakdyn` binary exposes the same functionality as subcommands; see
//! the crate README for the command grammar.

pub mod cohomology;
pub mod exact;
pub mod graph;
pub mod lfactor;
pub mod spectral;
pub mod suspension;
pub mod symbolic;
