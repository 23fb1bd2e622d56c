//! Post hoc confidence bounds on the number of false positives in arbitrary
//! selections of hypotheses.
//!
//! The central object is a *reference family*: a collection of regions
//! `R_k ⊆ {1, …, m}` together with integer budgets `ζ_k` bounding (with
//! simultaneous coverage) the number of true nulls inside each region. Once
//! such a family is calibrated, a bound `V(S)` on the false positives of any
//! user-chosen selection `S` follows by interpolation, and the bound is valid
//! *post hoc*: `S` may be picked after looking at the data, any number of
//! times.
//!
//! The crate provides
//!
//! * [`family`] — validation and indexing of forest-structured families
//!   (regions pairwise disjoint or nested): atoms, depths, completion,
//!   level sets;
//! * [`bounds`] — the interpolation bounds: the simple bound, the subset
//!   minimum, the optimal bound via bottom-up dynamic programming on
//!   forests, and an exhaustive-search oracle;
//! * [`calibration`] — budgets `ζ_k` from p-values via a DKW-type deviation
//!   inequality (and the Genovese–Wasserman variant), plus the classical
//!   Simes, Bonferroni and hybrid bounds;
//! * [`simulation`] — a seeded Gaussian test bed, partition/tree reference
//!   regions, confidence envelopes over top-k selections, joint error rate
//!   coverage estimation, and the analytic DKW/Simes comparison curve.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! [`libm`] so results are identical across platforms and thread schedules.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

#[cfg(test)]
pub(crate) mod testutil;

pub mod bounds;
pub mod calibration;
pub mod family;
pub mod normal;
pub mod rng;
pub mod simulation;

pub use bounds::Selection;
pub use family::{ForestIndex, ReferenceFamily, Region};
pub use calibration::{NullMask, PValueVector};
