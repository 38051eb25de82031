//! Special functions, the Fresnel correlation kernel, small complex linear
//! algebra and seeded random streams.

mod fresnel;
mod kernel;
mod linalg;
mod rng;

use thiserror::Error;

pub use fresnel::{fresnel, FresnelPair, SERIES_LIMIT};
pub use kernel::{g_kernel, SMALL_BETA2};
pub use linalg::{pseudo_inverse, ComplexVector, RANK_TOLERANCE};
pub use rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument is not finite: {0}")]
    NonFinite(f64),
    #[error("beta2 must be non-negative, got {0}")]
    NegativeBeta2(f64),
    #[error("matrix is rank deficient (smallest singular value {smallest:e})")]
    Singular { smallest: f64 },
    #[error("bad matrix shape: {0}")]
    Dimension(String),
}
