//! Numerical laboratory for Liouville first passage percolation (LFPP).
//!
//! The crate is organised bottom-up:
//!
//! * [`gff`] synthesises log-correlated Gaussian fields on a periodic lattice
//!   and computes circle averages.
//! * [`mollify`] smooths fields with the heat kernel, either globally (FFT) or
//!   with a compactly supported, renormalised kernel.
//! * [`metric`] turns a mollified field into an 8-connected weighted lattice
//!   and answers point, set, crossing and annulus distance queries.
//! * [`estimators`] runs Monte Carlo estimates of the scaling constants and the
//!   distance exponent.
//! * [`harness`] wires everything into reproducible command-line experiments.

// Negated float comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod fft;
pub mod gff;
pub mod harness;
pub mod metric;
pub mod mollify;
pub mod rng;

pub use error::{LfppError, Result};
pub use gff::{GridField, SamplerConfig};
pub use metric::{AnnulusSpec, DistanceResult, RegionMask, WeightedGrid};
pub use mollify::{MollifiedField, MollifierKind};
