//! Numerical companion for effective equidistribution of horocycle lifts in
//! `ASL(2,Z)\ASL(2,R)` and the gap statistics of `sqrt(n) mod 1`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arithmetic`]: factorization, modular inverses, smooth/coprime splits,
//!   exact root-of-unity phases and sieved `3^omega` partial sums.
//! * [`expsums`]: complete exponential sums (direct and CRT-factored) and
//!   their bound reports.
//! * [`lattice`]: the affine group, affine lattice enumeration, the
//!   triangle functional `L` and Haar sampling.
//! * [`gapstats`]: finite-`N` gap distributions of `sqrt(n) mod 1`.
//! * [`limit_mc`]: Monte Carlo and quadrature estimates of the limit laws.
//! * [`harness`]: the standalone inequality checks and CSV bound sweeps.
//!
//! Heavy loops go through [`par`], which uses rayon when the `parallel`
//! feature is enabled and plain iterators otherwise. Every reduction is done
//! over a fixed block partition so results do not depend on thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod expsums;
pub mod gapstats;
pub mod harness;
pub mod lattice;
pub mod limit_mc;
pub mod par;
pub mod quadrature;
pub mod report;
pub mod thresholds;

mod error;

pub use error::{Error, Result};

/// Version string echoed into output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
