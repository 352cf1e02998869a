//! Scale-wise comparison of probability densities from their moments.
//!
//! Two densities on a compact support whose first `n` moments are close
//! (or whose moment differences are bounded) agree at large length scales.
//! This crate computes the inverse length scale `K` below which the
//! low-pass filtered densities are guaranteed to lie within a tolerance
//! `ε` in normalized L1 distance, and provides the machinery to check the
//! guarantee by filtering the densities directly.
//!
//! The pipeline is:
//!
//! 1. [`moments::compute_moments`] (or [`moments::empirical_moments`]) for each density,
//! 2. [`moments::moment_gap`] to form the gaps `M_k` and remainder `R_n`,
//! 3. [`cutoff::build_polynomial`] and [`cutoff::solve_unique_root`] for `K`,
//! 4. [`spectral::lowpass`] and [`spectral::distance`] to verify.
//!
//! Every density lives on the unit interval (or unit square) sampled on a
//! uniform grid with an odd number of nodes; all integrals use composite
//! Simpson from [`quadrature`].

#![forbid(unsafe_code)]

pub mod cutoff;
pub mod error;
pub mod generators;
pub mod model;
pub mod moments;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    AffineMap, ComparisonReport, Cutoff, GridFunction1D, GridFunction2D, MomentGap, MomentSet,
    MultiIndex, MultiMomentGap, MultiMomentSet, StrategyTag,
};
