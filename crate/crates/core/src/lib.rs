//! Learning a K-simplex from noisy uniform samples.
//!
//! The pipeline has three stages:
//! 1. **Bounding** ([`bounding`]): a pair statistic computed on the first half
//!    of the data yields a ball that contains the true simplex with high
//!    probability.
//! 2. **Quantization** ([`quantize`]): an ε-covering of that ball is built and
//!    every (K+1)-subset of covering points becomes a candidate simplex,
//!    giving a finite family that is representative for all well-shaped
//!    simplices inside the ball.
//! 3. **Selection** ([`select`]): a Scheffé minimum-distance tournament
//!    against the second half of the data picks the winning candidate.
//!
//! Supporting machinery: exact simplex geometry ([`simplex`]), the generative
//! model and deterministic RNG streams ([`sampling`], [`rng`]), total
//! variation distances and sample-complexity calculators ([`metrics`]), file
//! formats ([`io`]), and the end-to-end harness ([`pipeline`]).
//!
//! The supported envelope is K ≤ 4; exact measures are available for K ≤ 2
//! and Monte Carlo estimators cover the rest.

pub mod bounding;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod quantize;
pub mod rng;
pub mod sampling;
pub mod select;
pub mod simplex;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use simplex::{IsoperimetryParams, IsoperimetryReport, Simplex};

use serde::{Deserialize, Serialize};

/// Where an estimate of an unknown quantity (SNR, unit-volume root) came from.
///
/// `Oracle` means the true simplex was available (experiment mode), `Config`
/// means the user supplied the value, and `PlugIn` means it was estimated
/// from the pair statistic of the data itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Oracle,
    Config,
    PlugIn,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Oracle => write!(f, "oracle"),
            Provenance::Config => write!(f, "config"),
            Provenance::PlugIn => write!(f, "plug-in"),
        }
    }
}
