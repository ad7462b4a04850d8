//! Accuracy and efficiency of conformal sets, plus safe-set coverage.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{check_epsilon, set_from_rho_bar, sigma_from_rho_bar, CalibrationProfile, ConformalSet, Threshold};
use crate::error::{Error, Result};
use crate::model::{Label, LabeledSample, ScalableModel};

/// Metrics of one `(model, eps)` pair on a test set.
///
/// `err_minus` / `err_plus` are conditional on the true class (0 when the
/// class is absent); `csr_error_coverage` is the joint frequency of `y = -1`
/// and `x in S_eps` over the whole test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub epsilon: f64,
    pub s_eps: Threshold,
    pub n_test: usize,
    pub err: f64,
    pub err_minus: f64,
    pub err_plus: f64,
    pub empty_rate: f64,
    pub double_rate: f64,
    pub single_rate: f64,
    pub single_minus_rate: f64,
    pub single_plus_rate: f64,
    pub csr_error_coverage: f64,
    pub csr_mass: f64,
}

/// Column order of the report CSV.
pub const REPORT_HEADER: [&str; 13] = [
    "epsilon",
    "s_eps",
    "n_test",
    "err",
    "err_minus",
    "err_plus",
    "empty_rate",
    "double_rate",
    "single_rate",
    "single_minus_rate",
    "single_plus_rate",
    "csr_error_coverage",
    "csr_mass",
];

#[derive(Default)]
struct Counts {
    n: usize,
    n_minus: usize,
    n_plus: usize,
    miss: usize,
    miss_minus: usize,
    miss_plus: usize,
    empty: usize,
    double: usize,
    single_minus: usize,
    single_plus: usize,
    safe: usize,
    safe_minus: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Builds a report from precomputed roots `rho_bar(x_i)` and true labels.
pub fn report_from_rho_bars(rho_bars: &[f64], labels: &[Label], s_eps: Threshold, epsilon: f64) -> Result<CoverageReport> {
    check_epsilon(epsilon)?;
    if rho_bars.is_empty() {
        return Err(Error::input("empty test set"));
    }
    if rho_bars.len() != labels.len() {
        return Err(Error::input("rho_bar and label counts differ"));
    }
    let rho = s_eps.abs();
    let mut c = Counts {
        n: rho_bars.len(),
        ..Counts::default()
    };
    for (&r, &y) in rho_bars.iter().zip(labels) {
        let set = set_from_rho_bar(r, s_eps);
        let covered = set.contains(y);
        match y {
            Label::Minus => c.n_minus += 1,
            Label::Plus => c.n_plus += 1,
        }
        if !covered {
            c.miss += 1;
            match y {
                Label::Minus => c.miss_minus += 1,
                Label::Plus => c.miss_plus += 1,
            }
        }
        match set.len() {
            0 => c.empty += 1,
            2 => c.double += 1,
            _ => match set.singleton() {
                Some(Label::Plus) => c.single_plus += 1,
                _ => c.single_minus += 1,
            },
        }
        // r > |s_eps|  <=>  f(x, |s_eps|) < 0
        if rho.exceeded_by(r) {
            c.safe += 1;
            if y == Label::Minus {
                c.safe_minus += 1;
            }
        }
    }
    let single = c.single_minus + c.single_plus;
    Ok(CoverageReport {
        epsilon,
        s_eps,
        n_test: c.n,
        err: ratio(c.miss, c.n),
        err_minus: ratio(c.miss_minus, c.n_minus),
        err_plus: ratio(c.miss_plus, c.n_plus),
        empty_rate: ratio(c.empty, c.n),
        double_rate: ratio(c.double, c.n),
        single_rate: ratio(single, c.n),
        single_minus_rate: ratio(c.single_minus, c.n),
        single_plus_rate: ratio(c.single_plus, c.n),
        csr_error_coverage: ratio(c.safe_minus, c.n),
        csr_mass: ratio(c.safe, c.n),
    })
}

/// `rho_bar` of every test point, computed in parallel in input order.
pub fn test_rho_bars(m: &ScalableModel, test: &[LabeledSample]) -> Result<Vec<f64>> {
    test.par_iter().map(|s| m.rho_bar(s.x.as_slice())).collect()
}

pub fn evaluate(m: &ScalableModel, profile: &CalibrationProfile, epsilon: f64, test: &[LabeledSample]) -> Result<CoverageReport> {
    check_epsilon(epsilon)?;
    if test.is_empty() {
        return Err(Error::input("empty test set"));
    }
    let s_eps = profile.quantile(epsilon)?;
    let rho_bars = test_rho_bars(m, test)?;
    let labels: Vec<Label> = test.iter().map(|s| s.y).collect();
    report_from_rho_bars(&rho_bars, &labels, s_eps, epsilon)
}

/// One report per `eps` of an ascending grid, sharing a single pass of `rho_bar`.
pub fn sweep(m: &ScalableModel, profile: &CalibrationProfile, epsilon_grid: &[f64], test: &[LabeledSample]) -> Result<Vec<CoverageReport>> {
    if epsilon_grid.is_empty() {
        return Err(Error::input("empty epsilon grid"));
    }
    for &e in epsilon_grid {
        check_epsilon(e)?;
    }
    if epsilon_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("epsilon grid must be strictly ascending"));
    }
    if test.is_empty() {
        return Err(Error::input("empty test set"));
    }
    let rho_bars = test_rho_bars(m, test)?;
    let labels: Vec<Label> = test.iter().map(|s| s.y).collect();
    epsilon_grid
        .iter()
        .map(|&e| report_from_rho_bars(&rho_bars, &labels, profile.quantile(e)?, e))
        .collect()
}

/// `{0.05, 0.10, ..., 0.50}`.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 20.0).collect()
}

pub fn write_reports_csv<W: Write>(reports: &[CoverageReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in reports {
        w.write_record([
            r.epsilon.to_string(),
            r.s_eps.to_string(),
            r.n_test.to_string(),
            r.err.to_string(),
            r.err_minus.to_string(),
            r.err_plus.to_string(),
            r.empty_rate.to_string(),
            r.double_rate.to_string(),
            r.single_rate.to_string(),
            r.single_minus_rate.to_string(),
            r.single_plus_rate.to_string(),
            r.csr_error_coverage.to_string(),
            r.csr_mass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn reports_to_json(reports: &[CoverageReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

/// Axis-aligned 2-D box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Bounds {
    pub fn new(x1_min: f64, x1_max: f64, x2_min: f64, x2_max: f64) -> Result<Self> {
        let b = Bounds {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
        };
        if [x1_min, x1_max, x2_min, x2_max].iter().any(|v| !v.is_finite()) || x1_min >= x1_max || x2_min >= x2_max {
            return Err(Error::input(format!("invalid bounds {b:?}")));
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub x1: f64,
    pub x2: f64,
    pub set: ConformalSet,
    pub in_sigma: bool,
    pub in_safe_region: bool,
}

/// Classifies the centres of a `resolution x resolution` grid.
///
/// `in_sigma` comes from the conformal scores and `in_safe_region` from the
/// predictor evaluated at `rho_eps`, so the two columns are computed
/// independently.
pub fn region_grid(m: &ScalableModel, profile: &CalibrationProfile, epsilon: f64, bounds: Bounds, resolution: usize) -> Result<Vec<GridCell>> {
    if m.dim() != 2 {
        return Err(Error::input(format!("region grid needs a 2-D model, got dimension {}", m.dim())));
    }
    if resolution == 0 {
        return Err(Error::input("resolution must be positive"));
    }
    let s_eps = profile.quantile(epsilon)?;
    let rho = s_eps.abs();
    let h1 = (bounds.x1_max - bounds.x1_min) / resolution as f64;
    let h2 = (bounds.x2_max - bounds.x2_min) / resolution as f64;
    let cells: Vec<(f64, f64)> = (0..resolution)
        .flat_map(|j| (0..resolution).map(move |i| (i, j)))
        .map(|(i, j)| {
            (
                bounds.x1_min + (i as f64 + 0.5) * h1,
                bounds.x2_min + (j as f64 + 0.5) * h2,
            )
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(x1, x2)| {
            let x = [x1, x2];
            let r = m.rho_bar_unchecked(&x);
            let in_safe_region = match rho {
                Threshold::Finite(rho) => m.predictor_unchecked(&x, rho) < 0.0,
                Threshold::PlusInfinity => false,
            };
            GridCell {
                x1,
                x2,
                set: set_from_rho_bar(r, s_eps),
                in_sigma: sigma_from_rho_bar(r, s_eps),
                in_safe_region,
            }
        })
        .collect())
}

pub fn write_grid_csv<W: Write>(cells: &[GridCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x1", "x2", "category", "in_sigma", "in_safe_region"])?;
    for c in cells {
        w.write_record([
            c.x1.to_string(),
            c.x2.to_string(),
            c.set.category().to_string(),
            c.in_sigma.to_string(),
            c.in_safe_region.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
