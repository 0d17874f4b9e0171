//! Smooth, exactly moment-matched spectral densities for large sparse graphs.
//!
//! The pipeline: build a [`graph::SparseGraph`], take its halved normalized
//! Laplacian (spectrum in [0, 1]), estimate spectral moments by stochastic
//! trace estimation ([`moments`]), and fit the maximum-entropy density that
//! reproduces them exactly ([`maxent`]). Fitted densities admit closed-form
//! entropy and KL divergences, which power network comparison, model
//! classification, and parameter inference ([`analysis`]), as well as
//! spectral cluster counting ([`cluster`]). A Lanczos + Gaussian kernel
//! smoothing baseline lives in [`lanczos`] for head-to-head evaluation.

pub mod analysis;
pub mod cluster;
pub mod error;
pub mod graph;
pub mod grid;
pub mod lanczos;
pub mod maxent;
pub mod moments;

pub use error::{Error, Result};
