//! Scalable classifier predictors.
//!
//! Every model is stored in dual form: `w^T phi(x) = sum_i a_i k(x_i, x)` with
//! `a_i` the dual weights and `x_i` the support points. The three predictor
//! families are
//!
//! | variant | `f(x, rho)`                                   | `rho_bar(x)`            |
//! |---------|-----------------------------------------------|-------------------------|
//! | SVM     | `w^T phi(x) - b + rho`                        | `b - w^T phi(x)`        |
//! | SVDD    | `|phi(x) - w|^2 - R^2 + rho`                  | `R^2 - |phi(x) - w|^2`  |
//! | LR      | `1/2 - 1 / (1 + exp(w^T phi(x) - b + rho))`   | `b - w^T phi(x)`        |
//!
//! A point is classified `+1` iff `f(x, rho) < 0`; a zero predictor value
//! falls on the `-1` side.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::trainers::TrainConfig;

/// A point of the input space: nonempty, all coordinates finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("feature vector must have at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!("feature {i} is not finite")));
        }
        Ok(FeatureVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        FeatureVector::new(v)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

/// Binary label. `Plus` is the "safe" class (tunnel present in the DNS data),
/// `Minus` the "unsafe" one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Label {
    Minus,
    Plus,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Plus => 1.0,
            Label::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Plus),
            -1 => Ok(Label::Minus),
            other => Err(Error::input(format!("label must be -1 or 1, got {other}"))),
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        l.as_i8()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: FeatureVector,
    pub y: Label,
}

impl LabeledSample {
    pub fn new(x: Vec<f64>, y: Label) -> Result<Self> {
        Ok(LabeledSample {
            x: FeatureVector::new(x)?,
            y,
        })
    }
}

/// Variant-specific offset of a [`ScalableModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum Variant {
    Svm { bias: f64 },
    Svdd { radius_sq: f64, center_norm_sq: f64 },
    Lr { bias: f64 },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Svm { .. } => "svm",
            Variant::Svdd { .. } => "svdd",
            Variant::Lr { .. } => "lr",
        }
    }
}

/// Provenance stored with a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub config: TrainConfig,
    /// Index in the training set of each support point.
    pub support_indices: Vec<usize>,
    pub n_train: usize,
    pub iterations: usize,
    /// Final optimality residual reported by the solver.
    pub residual: f64,
}

/// A trained scalable classifier. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalableModel {
    #[serde(flatten)]
    pub variant: Variant,
    pub kernel: KernelSpec,
    pub support_points: Vec<FeatureVector>,
    pub dual_weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<TrainingMetadata>,
}

impl ScalableModel {
    pub fn svm(kernel: KernelSpec, support_points: Vec<FeatureVector>, dual_weights: Vec<f64>, bias: f64) -> Result<Self> {
        let m = ScalableModel {
            variant: Variant::Svm { bias },
            kernel,
            support_points,
            dual_weights,
            metadata: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn lr(kernel: KernelSpec, support_points: Vec<FeatureVector>, dual_weights: Vec<f64>, bias: f64) -> Result<Self> {
        let m = ScalableModel {
            variant: Variant::Lr { bias },
            kernel,
            support_points,
            dual_weights,
            metadata: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// SVDD model; the squared norm of the centre is computed from the weights.
    pub fn svdd(kernel: KernelSpec, support_points: Vec<FeatureVector>, dual_weights: Vec<f64>, radius_sq: f64) -> Result<Self> {
        let mut center_norm_sq = 0.0;
        for (i, xi) in support_points.iter().enumerate() {
            for (j, xj) in support_points.iter().enumerate() {
                center_norm_sq += dual_weights.get(i).copied().unwrap_or(0.0)
                    * dual_weights.get(j).copied().unwrap_or(0.0)
                    * kernel.eval_unchecked(xi.as_slice(), xj.as_slice());
            }
        }
        let m = ScalableModel {
            variant: Variant::Svdd {
                radius_sq,
                center_norm_sq,
            },
            kernel,
            support_points,
            dual_weights,
            metadata: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_metadata(mut self, metadata: TrainingMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.support_points.is_empty() {
            return Err(Error::input("model has no support points"));
        }
        if self.support_points.len() != self.dual_weights.len() {
            return Err(Error::input(format!(
                "{} support points but {} dual weights",
                self.support_points.len(),
                self.dual_weights.len()
            )));
        }
        let d = self.support_points[0].dim();
        if self.support_points.iter().any(|p| p.dim() != d) {
            return Err(Error::input("support points have inconsistent dimensions"));
        }
        if self.dual_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::input("dual weights must be finite"));
        }
        match self.variant {
            Variant::Svm { bias } | Variant::Lr { bias } => {
                if !bias.is_finite() {
                    return Err(Error::input("bias must be finite"));
                }
            }
            Variant::Svdd {
                radius_sq,
                center_norm_sq,
            } => {
                if !(radius_sq.is_finite() && radius_sq >= 0.0) {
                    return Err(Error::input("SVDD radius_sq must be finite and >= 0"));
                }
                if !center_norm_sq.is_finite() {
                    return Err(Error::input("SVDD center_norm_sq must be finite"));
                }
                let total: f64 = self.dual_weights.iter().sum();
                if (total - 1.0).abs() > 1e-8 {
                    return Err(Error::input(format!("SVDD dual weights sum to {total}, expected 1")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.support_points[0].dim()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(format!(
                "point has dimension {}, model expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `w^T phi(x)`.
    fn projection(&self, x: &[f64]) -> f64 {
        self.support_points
            .iter()
            .zip(&self.dual_weights)
            .map(|(p, a)| a * self.kernel.eval_unchecked(p.as_slice(), x))
            .sum()
    }

    /// The classifier predictor without its scale term, i.e. the part of
    /// `f(x, rho)` that does not depend on `rho` (before the LR link).
    fn raw(&self, x: &[f64]) -> f64 {
        match self.variant {
            Variant::Svm { bias } | Variant::Lr { bias } => self.projection(x) - bias,
            Variant::Svdd {
                radius_sq,
                center_norm_sq,
            } => {
                let dist_sq = self.kernel.eval_unchecked(x, x) - 2.0 * self.projection(x) + center_norm_sq;
                dist_sq - radius_sq
            }
        }
    }

    /// `f(x, rho)`.
    pub fn predictor(&self, x: &[f64], rho: f64) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.predictor_unchecked(x, rho))
    }

    pub(crate) fn predictor_unchecked(&self, x: &[f64], rho: f64) -> f64 {
        let t = self.raw(x) + rho;
        match self.variant {
            // 1/2 - 1/(1 + e^t) == tanh(t/2) / 2, which neither overflows nor
            // loses precision around the root.
            Variant::Lr { .. } => 0.5 * (0.5 * t).tanh(),
            _ => t,
        }
    }

    /// `+1` iff `f(x, rho) < 0`.
    pub fn classify(&self, x: &[f64], rho: f64) -> Result<Label> {
        Ok(if self.predictor(x, rho)? < 0.0 {
            Label::Plus
        } else {
            Label::Minus
        })
    }

    /// The unique root in `rho` of `f(x, rho) = 0`, in closed form.
    pub fn rho_bar(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.rho_bar_unchecked(x))
    }

    pub(crate) fn rho_bar_unchecked(&self, x: &[f64]) -> f64 {
        -self.raw(x)
    }

    /// Membership in the level set `S(rho) = { x : f(x, rho) < 0 }`.
    pub fn in_level_set(&self, x: &[f64], rho: f64) -> Result<bool> {
        Ok(self.predictor(x, rho)? < 0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ScalableModel = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Root of a continuous, strictly increasing function with a sign change,
/// by bracket expansion followed by bisection down to `1e-12` (relative to the
/// bracket magnitude). For predictor families without a closed-form root.
pub fn increasing_root(f: impl Fn(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut expansions = 0;
    while f(lo) >= 0.0 {
        lo *= 2.0;
        expansions += 1;
        if expansions > 1100 || !lo.is_finite() {
            return Err(Error::input("no sign change below: predictor is not scalable"));
        }
    }
    expansions = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::input("no sign change above: predictor is not scalable"));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) || mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn svm_unit() -> ScalableModel {
        ScalableModel::svm(KernelSpec::Linear, vec![fv(&[1.0, 0.0])], vec![1.0], 0.0).unwrap()
    }

    fn lr_unit() -> ScalableModel {
        ScalableModel::lr(KernelSpec::Linear, vec![fv(&[1.0, 0.0])], vec![1.0], 0.0).unwrap()
    }

    fn svdd_unit() -> ScalableModel {
        ScalableModel::svdd(KernelSpec::Linear, vec![fv(&[0.0, 0.0])], vec![1.0], 1.0).unwrap()
    }

    fn gaussian_mix() -> Vec<ScalableModel> {
        let k = KernelSpec::Gaussian { gamma: 0.8 };
        let pts = vec![fv(&[0.0, 0.0]), fv(&[1.0, 1.0]), fv(&[-1.0, 0.5])];
        vec![
            ScalableModel::svm(k, pts.clone(), vec![0.7, -1.2, 0.5], 0.1).unwrap(),
            ScalableModel::svdd(k, pts.clone(), vec![0.5, 0.3, 0.2], 0.4).unwrap(),
            ScalableModel::lr(KernelSpec::cubic(), pts, vec![0.2, -0.4, 0.1], -0.3).unwrap(),
        ]
    }

    #[test]
    fn feature_vector_rejects_non_finite() {
        assert!(FeatureVector::new(vec![]).is_err());
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn predictor_examples() {
        assert_eq!(svm_unit().predictor(&[2.0, 0.0], 0.0).unwrap(), 2.0);
        assert_eq!(svdd_unit().predictor(&[0.5, 0.0], 0.0).unwrap(), -0.75);
        assert_eq!(lr_unit().predictor(&[0.0, 0.0], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn classify_boundary_goes_to_minus() {
        assert_eq!(svdd_unit().classify(&[0.5, 0.0], 0.0).unwrap(), Label::Plus);
        // predictor exactly zero
        assert_eq!(lr_unit().classify(&[0.0, 0.0], 0.0).unwrap(), Label::Minus);
        assert_eq!(svm_unit().classify(&[2.0, 0.0], 0.0).unwrap(), Label::Minus);
    }

    #[test]
    fn rho_bar_examples() {
        assert_eq!(svm_unit().rho_bar(&[2.0, 0.0]).unwrap(), -2.0);
        assert_eq!(svdd_unit().rho_bar(&[0.5, 0.0]).unwrap(), 0.75);
        assert_eq!(lr_unit().rho_bar(&[2.0, 0.0]).unwrap(), -2.0);
    }

    #[test]
    fn level_set_is_strict() {
        let m = svdd_unit();
        assert!(m.in_level_set(&[0.5, 0.0], 0.0).unwrap());
        assert!(!m.in_level_set(&[0.5, 0.0], 0.75).unwrap());
        for m in gaussian_mix() {
            let x = [0.3, -0.2];
            let r = m.rho_bar(&x).unwrap();
            assert!(m.in_level_set(&x, r - 1e-6).unwrap());
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(svm_unit().predictor(&[1.0], 0.0), Err(Error::Input(_))));
        assert!(svm_unit().rho_bar(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(ScalableModel::svm(KernelSpec::Linear, vec![], vec![], 0.0).is_err());
        assert!(ScalableModel::svm(KernelSpec::Linear, vec![fv(&[1.0])], vec![1.0, 2.0], 0.0).is_err());
        assert!(ScalableModel::svdd(KernelSpec::Linear, vec![fv(&[1.0])], vec![0.5], 1.0).is_err());
        assert!(ScalableModel::svdd(KernelSpec::Linear, vec![fv(&[1.0])], vec![1.0], -1.0).is_err());
    }

    #[test]
    fn closed_form_root_matches_bisection() {
        for m in gaussian_mix() {
            for x in [[0.1, 0.2], [2.0, -1.0], [-0.7, 0.4]] {
                let closed = m.rho_bar(&x).unwrap();
                let bisected = increasing_root(|r| m.predictor(&x, r).unwrap()).unwrap();
                assert!((closed - bisected).abs() < 1e-9, "{closed} vs {bisected}");
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_predictions() {
        for m in gaussian_mix() {
            let back = ScalableModel::from_json(&m.to_json().unwrap()).unwrap();
            assert_eq!(back, m);
            for x in [[0.1, 0.2], [2.0, -1.0]] {
                let a = m.predictor(&x, 0.3).unwrap();
                let b = back.predictor(&x, 0.3).unwrap();
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn json_shape() {
        let v: serde_json::Value = serde_json::from_str(&svdd_unit().to_json().unwrap()).unwrap();
        assert_eq!(v["variant"], "svdd");
        assert_eq!(v["kernel"]["type"], "linear");
        assert_eq!(v["radius_sq"], 1.0);
        assert!(v.get("center_norm_sq").is_some());
        let bad = r#"{"variant":"svm","bias":0.0,"kernel":{"type":"linear"},"support_points":[[1.0]],"dual_weights":[]}"#;
        assert!(ScalableModel::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn root_and_monotonicity(x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, r1 in -5.0f64..5.0, gap in 0.01f64..5.0) {
            let x = [x1, x2];
            for m in gaussian_mix() {
                let root = m.rho_bar(&x).unwrap();
                prop_assert!(m.predictor(&x, root).unwrap().abs() <= 1e-9);
                let (a, b) = (root + r1, root + r1 + gap);
                prop_assert!(m.predictor(&x, a).unwrap() < m.predictor(&x, b).unwrap());
                // classification agrees with the root
                prop_assert_eq!(m.classify(&x, a).unwrap() == Label::Plus, a < root);
                // nested level sets
                if m.in_level_set(&x, b).unwrap() {
                    prop_assert!(m.in_level_set(&x, a).unwrap());
                }
            }
        }
    }
}
