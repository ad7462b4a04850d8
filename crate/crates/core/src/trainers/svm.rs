//! Soft-margin kernel SVM solved on the dual by sequential minimal optimization.
//!
//! The dual is written in minimization form
//!
//! ```text
//! min  1/2 a^T Q a - e^T a    s.t.  y^T a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Each iteration picks the maximal violating index `i` and the partner `j`
//! with the largest second-order decrease, then solves the two-variable
//! subproblem analytically.

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, GramMatrix};
use crate::model::{FeatureVector, LabeledSample, ScalableModel, TrainingMetadata, Variant};

use super::{require_both_classes, TrainConfig};

const TAU: f64 = 1e-12;

/// Raw output of the SMO solver.
#[derive(Debug, Clone)]
pub struct SvmDualSolution {
    pub alpha: Vec<f64>,
    /// Gradient `Q a - e` at `alpha`.
    pub gradient: Vec<f64>,
    /// Offset such that the decision value is `sum_j a_j y_j K(x_j, x) - offset`.
    pub offset: f64,
    pub iterations: usize,
    /// Maximal KKT violation `m(a) - M(a)` at return.
    pub violation: f64,
    pub converged: bool,
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Maximal violation `max_{I_up} -y G - min_{I_low} -y G` (0 when a set is empty).
fn max_violation(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    let mut big_m = f64::INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], c) {
            m = m.max(v);
        }
        if in_low(y[t], alpha[t], c) {
            big_m = big_m.min(v);
        }
    }
    if m.is_finite() && big_m.is_finite() {
        (m - big_m).max(0.0)
    } else {
        0.0
    }
}

/// Solves the SVM dual for the given Gram matrix and `+-1` labels.
///
/// Never fails: a run that hits `max_iterations` is returned with
/// `converged = false`.
pub fn solve_svm_dual(gram: &GramMatrix, y: &[f64], c: f64, tolerance: f64, max_iterations: usize) -> SvmDualSolution {
    let n = y.len();
    let run = smo(gram, y, c, vec![0.0; n], vec![-1.0; n], tolerance, max_iterations);
    let offset = compute_offset(&run.alpha, &run.gradient, y, c);
    SvmDualSolution {
        converged: run.violation <= tolerance,
        alpha: run.alpha,
        gradient: run.gradient,
        offset,
        iterations: run.iterations,
        violation: run.violation,
    }
}

pub(crate) struct SmoRun {
    pub alpha: Vec<f64>,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub violation: f64,
}

/// SMO on `min 1/2 a^T Q a + p^T a  s.t.  y^T a = const, 0 <= a_i <= C`,
/// started from a feasible `alpha` with matching `gradient = Q alpha + p`.
pub(crate) fn smo(
    gram: &GramMatrix,
    y: &[f64],
    c: f64,
    mut alpha: Vec<f64>,
    mut grad: Vec<f64>,
    tolerance: f64,
    max_iterations: usize,
) -> SmoRun {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * gram.get(i, j);

    let mut iterations = 0;
    let mut violation;
    loop {
        // working set selection
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::INFINITY;
        if i_sel != usize::MAX {
            let i = i_sel;
            let kii = gram.get(i, i);
            let row_i = gram.row(i);
            for t in 0..n {
                if !in_low(y[t], alpha[t], c) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = kii + gram.get(t, t) - 2.0 * row_i[t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let gain = -(b * b) / a;
                    if gain <= best_gain {
                        best_gain = gain;
                        j_sel = t;
                    }
                }
            }
        }
        violation = if i_sel == usize::MAX || !gmin.is_finite() {
            0.0
        } else {
            (gmax - gmin).max(0.0)
        };
        if violation <= tolerance || j_sel == usize::MAX {
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        let (row_i, row_j) = (gram.row(i), gram.row(j));
        let (yi, yj) = (y[i], y[j]);
        for t in 0..n {
            grad[t] += y[t] * (yi * row_i[t] * dai + yj * row_j[t] * daj);
        }
    }

    SmoRun {
        alpha,
        gradient: grad,
        iterations,
        violation,
    }
}

/// Average of `y_i G_i` over free support vectors; midpoint of the feasible
/// interval when none is free.
fn compute_offset(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        0.5 * (ub + lb)
    } else if ub.is_finite() {
        ub
    } else {
        lb
    }
}

/// Builds the model from a dual solution, negating `(w, b)` so that the
/// positive class lies on the negative side of the predictor.
fn model_from_solution(data: &[LabeledSample], y: &[f64], sol: &SvmDualSolution, cfg: &TrainConfig) -> Result<ScalableModel> {
    let support_indices: Vec<usize> = (0..data.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    if support_indices.is_empty() {
        return Err(Error::Training("SVM solution has no support vectors".into()));
    }
    let support_points: Vec<FeatureVector> = support_indices.iter().map(|&i| data[i].x.clone()).collect();
    let dual_weights: Vec<f64> = support_indices.iter().map(|&i| -sol.alpha[i] * y[i]).collect();
    let model = ScalableModel::svm(cfg.kernel, support_points, dual_weights, -sol.offset)?;
    Ok(model.with_metadata(TrainingMetadata {
        config: cfg.clone(),
        support_indices,
        n_train: data.len(),
        iterations: sol.iterations,
        residual: sol.violation,
    }))
}

fn labels(data: &[LabeledSample]) -> Vec<f64> {
    data.iter().map(|s| s.y.sign()).collect()
}

/// Trains a soft-margin kernel SVM.
pub fn train_svm(data: &[LabeledSample], cfg: &TrainConfig) -> Result<ScalableModel> {
    let (model, sol) = fit(data, cfg)?;
    if !sol.converged {
        return Err(Error::NotConverged {
            solver: "SMO",
            iterations: sol.iterations,
            residual: sol.violation,
        });
    }
    Ok(model)
}

/// Like [`train_svm`] but returns the model even when the iteration budget ran out.
pub(crate) fn fit(data: &[LabeledSample], cfg: &TrainConfig) -> Result<(ScalableModel, SvmDualSolution)> {
    cfg.validate()?;
    require_both_classes(data)?;
    let points: Vec<&[f64]> = data.iter().map(|s| s.x.as_slice()).collect();
    let gram = gram_matrix(&cfg.kernel, &points)?;
    let y = labels(data);
    let sol = solve_svm_dual(&gram, &y, cfg.c, cfg.tolerance, cfg.max_iterations);
    let model = model_from_solution(data, &y, &sol, cfg)?;
    Ok((model, sol))
}

/// Maximum KKT violation of an SVM model on its training data.
///
/// Combines the pairwise violation `m(a) - M(a)`, box infeasibility and the
/// equality residual `|sum_i a_i y_i|`.
pub fn kkt_violation(m: &ScalableModel, data: &[LabeledSample], cfg: &TrainConfig) -> Result<f64> {
    if !matches!(m.variant, Variant::Svm { .. }) {
        return Err(Error::input(format!(
            "KKT check needs an SVM model, got {}",
            m.variant.name()
        )));
    }
    let meta = m
        .metadata
        .as_ref()
        .ok_or_else(|| Error::input("model carries no training metadata"))?;
    if meta.n_train != data.len() {
        return Err(Error::input(format!(
            "model was trained on {} samples, got {}",
            meta.n_train,
            data.len()
        )));
    }
    let y = labels(data);
    let mut alpha = vec![0.0; data.len()];
    for (&idx, &w) in meta.support_indices.iter().zip(&m.dual_weights) {
        if idx >= data.len() {
            return Err(Error::input("support index out of range"));
        }
        // dual weight = -a_i y_i
        alpha[idx] = -w * y[idx];
    }
    let c = cfg.c;
    let box_violation = alpha
        .iter()
        .map(|&a| (-a).max(a - c).max(0.0))
        .fold(0.0, f64::max);
    let equality: f64 = alpha.iter().zip(&y).map(|(a, yi)| a * yi).sum::<f64>().abs();

    let grad: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let wx: f64 = m
                .support_points
                .iter()
                .zip(&m.dual_weights)
                .map(|(p, w)| -w * m.kernel.eval_unchecked(p.as_slice(), s.x.as_slice()))
                .sum();
            y[i] * wx - 1.0
        })
        .collect();
    let pair = max_violation(&alpha, &grad, &y, c);
    Ok(pair.max(box_violation).max(equality))
}
