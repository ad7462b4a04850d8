//! Scalable binary classifiers combined with inductive conformal prediction.
//!
//! A *scalable classifier* is a predictor `f(x, rho)` that is continuous and
//! strictly increasing in the scale parameter `rho`; a point is labelled `+1`
//! ("safe") when `f(x, rho) < 0`. The unique root `rho_bar(x)` of
//! `f(x, rho) = 0` yields the score `s(x, y) = -y * rho_bar(x)`, which plugs
//! directly into split conformal prediction.
//!
//! From the calibration quantile `s_eps` the crate builds two regions of the
//! input space:
//!
//! - the conformal safety region `Sigma_eps`, the points whose conformal set is
//!   exactly `{+1}`;
//! - the safe set `S_eps = { x : f(x, |s_eps|) < 0 }`, a single level set of the
//!   classifier, always contained in `Sigma_eps`; the two differ at most on
//!   the boundary `rho_bar(x) = |s_eps|`.
//!
//! The probability of observing a `-1` label inside `S_eps` is at most `eps`.
//!
//! Module map:
//!
//! - [`kernels`]: linear, polynomial and Gaussian kernels, Gram matrices
//! - [`model`]: feature vectors, labels and the [`ScalableModel`] predictor
//! - [`trainers`]: SVM and SVDD (both by SMO) and kernel logistic regression
//! - [`conformal`]: scores, calibration, quantiles, conformal sets and regions
//! - [`evaluation`]: coverage reports, epsilon sweeps and 2-D region grids
//! - [`data`]: synthetic generators, splits and CSV IO
//! - [`cli`]: the command implementations behind the `csr` binary
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod conformal;
pub mod data;
mod error;
pub mod evaluation;
pub mod kernels;
pub mod model;
pub mod trainers;

pub use conformal::{CalibrationProfile, ConformalSet, Threshold};
pub use error::{Error, Result};
pub use evaluation::CoverageReport;
pub use kernels::KernelSpec;
pub use model::{FeatureVector, Label, LabeledSample, ScalableModel};
pub use trainers::{ClassifierKind, TrainConfig};
