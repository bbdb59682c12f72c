//! Estimation of local mean densities and local Bartlett spectra of locally
//! stationary Hawkes processes, with an exact simulator and Monte-Carlo
//! validation harness.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandwidth;
pub mod curve;
pub mod error;
pub mod estimate;
pub mod events;
pub mod kernels;
pub mod model;
pub mod pipeline;
pub mod quad;
pub mod simulate;
pub mod validate;

pub use curve::Curve;
pub use error::{Error, Result};
pub use events::EventSeries;
pub use kernels::{FreqKernel, ModulatedKernel, ScaledTimeKernel, TimeKernel};
pub use num_complex::Complex64;
