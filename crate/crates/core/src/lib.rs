//! Smooth random fields on regular lattices and the statistics of their
//! excursion sets.
//!
//! The crate covers the whole chain used to threshold a statistical map with
//! familywise error control:
//!
//! * [`grid`]: lattice geometry, seeded white noise, derived χ²/t/F fields,
//!   Riemann-sum integration and finite differences.
//! * [`smoothing`]: Gaussian kernels, FWHM/σ/λ conversions, separable
//!   zero-padded convolution and the covariance of smoothed white noise.
//! * [`topology`]: excursion sets, the cubical-complex Euler characteristic,
//!   intrinsic volumes and connected components.
//! * [`rft`]: Euler characteristic densities, the expected EC expansion,
//!   threshold inversion, Bonferroni, the Rice formula and Poisson clumping.
//! * [`montecarlo`]: the replicated simulation harness that validates every
//!   theoretical quantity above.
//!
//! Everything is `no_std` with `alloc`; file formats, the parallel driver and
//! the command line live in the companion `rft` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod grid;
pub mod montecarlo;
pub mod normal;
mod quad;
pub mod rft;
pub mod smoothing;
pub mod topology;

pub use error::{Error, Result};
pub use grid::{FieldSpec, Family, Grid, RngSeed, ScalarField};
pub use smoothing::{Kernel1D, Smoothness, SmoothnessParams};
pub use topology::{BinaryMask, IntrinsicVolumes};


