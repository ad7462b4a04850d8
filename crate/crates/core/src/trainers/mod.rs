//! Training of the three scalable classifier families.
//!
//! All trainers orient their output so that the `+1` class satisfies
//! `f(x, 0) < 0`, i.e. `rho_bar(x)` is the trainer's own decision value
//! (positive on the `+1` side).

mod lr;
mod svdd;
mod svm;

pub use lr::{train_lr, LogisticObjective};
pub use svdd::train_svdd;
pub use svm::{kkt_violation, solve_svm_dual, train_svm, SvmDualSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::model::{Label, LabeledSample, ScalableModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Svdd,
    Lr,
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(ClassifierKind::Svm),
            "svdd" => Ok(ClassifierKind::Svdd),
            "lr" => Ok(ClassifierKind::Lr),
            other => Err(Error::input(format!("unknown classifier kind `{other}`"))),
        }
    }
}

/// Hyperparameters of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ClassifierKind,
    pub kernel: KernelSpec,
    /// Regularization constant `C`.
    #[serde(rename = "C")]
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Initial step of the logistic-regression line search.
    pub learning_rate: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(kind: ClassifierKind, kernel: KernelSpec) -> Self {
        TrainConfig {
            kind,
            kernel,
            c: 1.0,
            tolerance: 1e-6,
            max_iterations: 100_000,
            learning_rate: 0.1,
            seed: 0,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::input("C must be finite and > 0"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::input("tolerance must be finite and > 0"));
        }
        if self.max_iterations == 0 {
            return Err(Error::input("max_iterations must be positive"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::input("learning_rate must be finite and > 0"));
        }
        Ok(())
    }
}

/// Trains the classifier selected by `cfg.kind`.
pub fn train(data: &[LabeledSample], cfg: &TrainConfig) -> Result<ScalableModel> {
    match cfg.kind {
        ClassifierKind::Svm => train_svm(data, cfg),
        ClassifierKind::Svdd => train_svdd(data, cfg),
        ClassifierKind::Lr => train_lr(data, cfg),
    }
}

/// Shared input checks: consistent dimensions, and the label counts.
fn check_data(data: &[LabeledSample]) -> Result<(usize, usize)> {
    let first = data
        .first()
        .ok_or_else(|| Error::input("empty training set"))?;
    let d = first.x.dim();
    if let Some(i) = data.iter().position(|s| s.x.dim() != d) {
        return Err(Error::input(format!(
            "training sample {i} has dimension {} (expected {d})",
            data[i].x.dim()
        )));
    }
    let plus = data.iter().filter(|s| s.y == Label::Plus).count();
    Ok((plus, data.len() - plus))
}

fn require_both_classes(data: &[LabeledSample]) -> Result<()> {
    let (plus, minus) = check_data(data)?;
    if data.len() < 2 || plus == 0 || minus == 0 {
        return Err(Error::Training(format!(
            "both labels are required (got {plus} positive, {minus} negative samples)"
        )));
    }
    Ok(())
}
