//! Verification workbench for contextuality and indistinguishability.
//!
//! - [`qset`]: indistinguishability classes, strong singletons and the
//!   collapse of quasi-functions.
//! - [`scenario`]: observables and contexts, with the `.scn` text format.
//! - [`ks`]: Kochen-Specker parity certificates, exhaustive colouring search
//!   and vector-realization checks.
//! - [`inequality`]: the three-variable correlation inequality, its classical
//!   and context-indexed valuation tables, and a realizability test.
//! - [`hilbert`]: projectors, density operators, partial trace, no-signaling.
//! - [`fock`]: symmetrizers, Fock sectors and the two-fermion density.
//! - [`cli`] and [`report`]: the `qontext` command.

pub mod cli;
pub mod fock;
pub mod hilbert;
pub mod inequality;
pub mod ks;
pub mod qset;
pub mod report;
pub mod scenario;
