//! Inductive conformal prediction on top of a scalable classifier.
//!
//! The score of a candidate label is `s(x, y) = -y * rho_bar(x)`. Calibration
//! scores use the true labels of a held-out set; the threshold `s_eps` is the
//! `ceil((n_c + 1)(1 - eps))`-th smallest of them, or `+inf` when that rank
//! exceeds `n_c`.
//!
//! Two regions are derived from `s_eps`:
//!
//! - `Sigma_eps`: `s(x, +1) <= s_eps` and `s(x, -1) > s_eps` (conformal set `{+1}`),
//! - `S_eps`: `f(x, |s_eps|) < 0`, a level set of the classifier.
//!
//! `S_eps` is always a subset of `Sigma_eps`, with equality when `s_eps <= 0`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Label, LabeledSample, ScalableModel};

/// A conformal threshold: a finite score or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    PlusInfinity,
}

impl Threshold {
    pub fn is_infinite(self) -> bool {
        matches!(self, Threshold::PlusInfinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(v) => Some(v),
            Threshold::PlusInfinity => None,
        }
    }

    /// `value <= self`
    #[inline]
    pub fn admits(self, value: f64) -> bool {
        match self {
            Threshold::Finite(t) => value <= t,
            Threshold::PlusInfinity => true,
        }
    }

    /// `value > self`
    #[inline]
    pub fn exceeded_by(self, value: f64) -> bool {
        match self {
            Threshold::Finite(t) => value > t,
            Threshold::PlusInfinity => false,
        }
    }

    pub fn abs(self) -> Threshold {
        match self {
            Threshold::Finite(t) => Threshold::Finite(t.abs()),
            inf => inf,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Threshold::Finite(t) => t,
            Threshold::PlusInfinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(v) => fmt::Display::fmt(v, f),
            Threshold::PlusInfinity => f.pad("inf"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(v) => s.serialize_f64(*v),
            Threshold::PlusInfinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Threshold::Finite(v)),
            Raw::Text(t) if t == "inf" || t == "+inf" => Ok(Threshold::PlusInfinity),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid threshold `{t}`"))),
        }
    }
}

/// A conformal prediction set over `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConformalSet {
    pub contains_plus: bool,
    pub contains_minus: bool,
}

impl ConformalSet {
    pub const EMPTY: ConformalSet = ConformalSet {
        contains_plus: false,
        contains_minus: false,
    };
    pub const BOTH: ConformalSet = ConformalSet {
        contains_plus: true,
        contains_minus: true,
    };
    pub const PLUS: ConformalSet = ConformalSet {
        contains_plus: true,
        contains_minus: false,
    };
    pub const MINUS: ConformalSet = ConformalSet {
        contains_plus: false,
        contains_minus: true,
    };

    pub fn contains(&self, y: Label) -> bool {
        match y {
            Label::Plus => self.contains_plus,
            Label::Minus => self.contains_minus,
        }
    }

    pub fn len(&self) -> usize {
        self.contains_plus as usize + self.contains_minus as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The label of a singleton set.
    pub fn singleton(&self) -> Option<Label> {
        match (self.contains_plus, self.contains_minus) {
            (true, false) => Some(Label::Plus),
            (false, true) => Some(Label::Minus),
            _ => None,
        }
    }

    pub fn category(&self) -> &'static str {
        match (self.contains_plus, self.contains_minus) {
            (true, true) => "double",
            (true, false) => "plus",
            (false, true) => "minus",
            (false, false) => "empty",
        }
    }
}

/// Sorted calibration scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct CalibrationProfile {
    n_c: usize,
    sorted_scores: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    n_c: usize,
    sorted_scores: Vec<f64>,
}

impl TryFrom<RawProfile> for CalibrationProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        if raw.sorted_scores.is_empty() {
            return Err(Error::input("calibration profile has no scores"));
        }
        if raw.n_c != raw.sorted_scores.len() {
            return Err(Error::input(format!(
                "n_c = {} but {} scores",
                raw.n_c,
                raw.sorted_scores.len()
            )));
        }
        if raw.sorted_scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::input("calibration scores must be finite"));
        }
        if raw.sorted_scores.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("calibration scores are not sorted"));
        }
        Ok(CalibrationProfile {
            n_c: raw.n_c,
            sorted_scores: raw.sorted_scores,
        })
    }
}

impl CalibrationProfile {
    /// Builds a profile from unsorted scores.
    pub fn from_scores(mut scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::input("empty calibration set"));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::input("calibration scores must be finite"));
        }
        scores.sort_by(f64::total_cmp);
        Ok(CalibrationProfile {
            n_c: scores.len(),
            sorted_scores: scores,
        })
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn sorted_scores(&self) -> &[f64] {
        &self.sorted_scores
    }

    pub fn quantile(&self, epsilon: f64) -> Result<Threshold> {
        let k = conformal_rank(self.n_c, epsilon)?;
        Ok(if k > self.n_c {
            Threshold::PlusInfinity
        } else {
            Threshold::Finite(self.sorted_scores[k - 1])
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::input(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// `k = ceil((n_c + 1)(1 - eps))`, 1-based.
///
/// Products that land within a relative `1e-9` of an integer are snapped to
/// it, so that e.g. `n_c = 99, eps = 0.05` gives `k = 95` despite `0.95` not
/// being representable.
pub fn conformal_rank(n_c: usize, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    let x = (n_c as f64 + 1.0) * (1.0 - epsilon);
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok((k as usize).max(1))
}

/// `s(x, y_hat) = -y_hat * rho_bar(x)`.
pub fn score(m: &ScalableModel, x: &[f64], y_hat: Label) -> Result<f64> {
    Ok(-y_hat.sign() * m.rho_bar(x)?)
}

/// Scores every calibration pair with its true label.
pub fn calibrate(m: &ScalableModel, calib: &[LabeledSample]) -> Result<CalibrationProfile> {
    if calib.is_empty() {
        return Err(Error::input("empty calibration set"));
    }
    let scores = calib
        .iter()
        .map(|s| score(m, s.x.as_slice(), s.y))
        .collect::<Result<Vec<_>>>()?;
    CalibrationProfile::from_scores(scores)
}

pub fn quantile(p: &CalibrationProfile, epsilon: f64) -> Result<Threshold> {
    p.quantile(epsilon)
}

/// `rho_eps = |s_eps|`.
pub fn rho_eps(p: &CalibrationProfile, epsilon: f64) -> Result<Threshold> {
    Ok(p.quantile(epsilon)?.abs())
}

/// Conformal set of a point given its root `rho_bar` and the threshold.
pub fn set_from_rho_bar(rho_bar: f64, s_eps: Threshold) -> ConformalSet {
    ConformalSet {
        contains_plus: s_eps.admits(-rho_bar),
        contains_minus: s_eps.admits(rho_bar),
    }
}

/// `Sigma_eps` membership given `rho_bar`.
pub fn sigma_from_rho_bar(rho_bar: f64, s_eps: Threshold) -> bool {
    s_eps.admits(-rho_bar) && s_eps.exceeded_by(rho_bar)
}

/// Strict variant `Sigma_eps^a`: `s(x, +1) < s_eps` and `s(x, -1) > s_eps`.
pub fn sigma_strict_from_rho_bar(rho_bar: f64, s_eps: Threshold) -> bool {
    let plus_strict = match s_eps {
        Threshold::Finite(t) => -rho_bar < t,
        Threshold::PlusInfinity => true,
    };
    plus_strict && s_eps.exceeded_by(rho_bar)
}

pub fn conformal_set(m: &ScalableModel, p: &CalibrationProfile, epsilon: f64, x: &[f64]) -> Result<ConformalSet> {
    let s_eps = p.quantile(epsilon)?;
    Ok(ConformalSet {
        contains_plus: s_eps.admits(score(m, x, Label::Plus)?),
        contains_minus: s_eps.admits(score(m, x, Label::Minus)?),
    })
}

/// Membership in the conformal safety region `Sigma_eps`.
pub fn in_sigma(m: &ScalableModel, p: &CalibrationProfile, epsilon: f64, x: &[f64]) -> Result<bool> {
    let s_eps = p.quantile(epsilon)?;
    Ok(s_eps.admits(score(m, x, Label::Plus)?) && s_eps.exceeded_by(score(m, x, Label::Minus)?))
}

/// Membership in `Sigma_eps^a`, the strict part of the safety region.
pub fn in_sigma_strict(m: &ScalableModel, p: &CalibrationProfile, epsilon: f64, x: &[f64]) -> Result<bool> {
    let s_eps = p.quantile(epsilon)?;
    Ok(sigma_strict_from_rho_bar(m.rho_bar(x)?, s_eps))
}

/// Membership in the safe set `S_eps = { x : f(x, rho_eps) < 0 }`, evaluated
/// through the predictor itself.
pub fn in_safe_region(m: &ScalableModel, p: &CalibrationProfile, epsilon: f64, x: &[f64]) -> Result<bool> {
    match rho_eps(p, epsilon)? {
        Threshold::PlusInfinity => {
            m.rho_bar(x)?;
            Ok(false)
        }
        Threshold::Finite(rho) => m.in_level_set(x, rho),
    }
}
