//! Deep narrow ReLU networks for log-Barron targets.
//!
//! Spectral targets (finite Fourier sums on a box) are approximated by
//! sampling frequencies, realising each one as a width-3 ReLU network built
//! from triangle maps, and merging the pieces into a single deep network of
//! width `d + 4`. The crate also estimates the resulting errors, fits
//! convergence rates and evaluates the Rademacher and embedding diagnostics.

// negated float comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod constructor;
pub mod error;
pub mod metrics;
pub mod network;
pub mod rng;
pub mod spectral;

pub use constructor::{build, build_h1, build_l2, BuildConfig, BuildReport};
pub use error::{Error, Result};
pub use metrics::{QuadratureSpec, ScalarField};
pub use network::{ReluNetwork, Variant};
pub use spectral::{DomainBox, FourierMode, NormKind, SpectralTarget};
