//! High-precision laboratory for band-limited extrapolation: frequency
//! samplings of [-1,1], generalized trigonometric sums and their coefficient
//! rules, extrapolation sweeps with convergence verdicts, discrete Taylor and
//! Legendre machinery, a gallery of concrete targets, and Fourier-decay
//! certificates for periodic functions.
//!
//! Everything numerical runs under an explicit [`precision::Policy`] with a
//! fixed summation order, so outputs are bit-reproducible across runs and
//! thread counts. Exact-rational twins of the core pipelines anchor the
//! floating-point results in tests.

pub mod casebook;
pub mod discrete_taylor;
pub mod error;
pub mod legendre;
pub mod par;
pub mod periodic;
pub mod precision;
pub mod sampling;
pub mod supershift;
pub mod target;
pub mod trigpoly;

pub use error::{Error, Result};
pub use precision::Policy;
