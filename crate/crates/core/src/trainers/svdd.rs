//! Support vector data description around the `+1` class.
//!
//! With `a_i` the multipliers and `beta_i = y_i a_i`, the dual in
//! minimization form reads
//!
//! ```text
//! min  beta^T K beta - sum_i beta_i K_ii    s.t.  sum_i y_i a_i = 1,  0 <= a_i <= C
//! ```
//!
//! Negative samples, when present, are pushed outside the sphere; without
//! them this is the one-class minimal enclosing ball. Halving the objective
//! gives the same box-and-one-equality structure as the SVM dual, so the
//! problem is solved by the same SMO routine, started from the uniform
//! weights on the `+1` samples. The reported residual is the KKT gap of the
//! unscaled objective.

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, GramMatrix};
use crate::model::{FeatureVector, Label, LabeledSample, ScalableModel, TrainingMetadata};

use super::svm::smo;
use super::{check_data, TrainConfig};

/// `Q v` with `Q_ij = y_i y_j K_ij`.
fn q_mul(gram: &GramMatrix, y: &[f64], v: &[f64]) -> Vec<f64> {
    let yv: Vec<f64> = v.iter().zip(y).map(|(a, b)| a * b).collect();
    gram.mul_vec(&yv).into_iter().zip(y).map(|(a, b)| a * b).collect()
}

struct SvddSolution {
    alpha: Vec<f64>,
    /// `Q alpha`
    q_alpha: Vec<f64>,
    iterations: usize,
    gap: f64,
}

fn solve(gram: &GramMatrix, y: &[f64], c: f64, tolerance: f64, max_iterations: usize) -> Result<SvddSolution> {
    let n_pos = y.iter().filter(|&&v| v > 0.0).count();
    let alpha: Vec<f64> = y
        .iter()
        .map(|&v| if v > 0.0 { 1.0 / n_pos as f64 } else { 0.0 })
        .collect();
    // halved objective: 1/2 a^T Q a + p^T a with p_i = -y_i K_ii / 2
    let p: Vec<f64> = gram.diagonal().iter().zip(y).map(|(k, yi)| -0.5 * k * yi).collect();
    let grad: Vec<f64> = q_mul(gram, y, &alpha).iter().zip(&p).map(|(qa, pi)| qa + pi).collect();
    let run = smo(gram, y, c, alpha, grad, 0.5 * tolerance, max_iterations);
    let gap = 2.0 * run.violation;
    if gap > tolerance {
        return Err(Error::NotConverged {
            solver: "SVDD SMO",
            iterations: run.iterations,
            residual: gap,
        });
    }
    let q_alpha = run.gradient.iter().zip(&p).map(|(g, pi)| g - pi).collect();
    Ok(SvddSolution {
        alpha: run.alpha,
        q_alpha,
        iterations: run.iterations,
        gap,
    })
}

/// Trains an SVDD sphere enclosing the `+1` samples.
pub fn train_svdd(data: &[LabeledSample], cfg: &TrainConfig) -> Result<ScalableModel> {
    cfg.validate()?;
    let (n_pos, _) = check_data(data)?;
    if n_pos == 0 {
        return Err(Error::Training("SVDD needs at least one +1 sample".into()));
    }
    if cfg.c * (n_pos as f64) < 1.0 {
        return Err(Error::Training(format!(
            "SVDD infeasible: C * n_pos = {} < 1",
            cfg.c * n_pos as f64
        )));
    }
    let points: Vec<&[f64]> = data.iter().map(|s| s.x.as_slice()).collect();
    let gram = gram_matrix(&cfg.kernel, &points)?;
    let y: Vec<f64> = data.iter().map(|s| s.y.sign()).collect();
    let c = cfg.c;
    let sol = solve(&gram, &y, c, cfg.tolerance, cfg.max_iterations)?;

    // beta = y * alpha; (K beta)_i = y_i (Q alpha)_i; beta^T K beta = alpha^T Q alpha
    let center_norm_sq: f64 = sol.alpha.iter().zip(&sol.q_alpha).map(|(a, q)| a * q).sum();
    let dist_sq: Vec<f64> = (0..data.len())
        .map(|i| gram.get(i, i) - 2.0 * y[i] * sol.q_alpha[i] + center_norm_sq)
        .collect();

    // R^2 from the KKT conditions: free multipliers sit on the sphere
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for (i, s) in data.iter().enumerate() {
        let a = sol.alpha[i];
        let d = dist_sq[i];
        if a > 0.0 && a < c {
            free_sum += d;
            n_free += 1;
            continue;
        }
        let at_zero = a <= 0.0;
        match (s.y, at_zero) {
            (Label::Plus, true) | (Label::Minus, false) => lower = lower.max(d),
            (Label::Plus, false) | (Label::Minus, true) => upper = upper.min(d),
        }
    }
    let radius_sq = if n_free > 0 {
        free_sum / n_free as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
    .max(0.0);

    let support_indices: Vec<usize> = (0..data.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let support_points: Vec<FeatureVector> = support_indices.iter().map(|&i| data[i].x.clone()).collect();
    let mut dual_weights: Vec<f64> = support_indices.iter().map(|&i| y[i] * sol.alpha[i]).collect();
    // absorb rounding so the weights sum to exactly one
    let total: f64 = dual_weights.iter().sum();
    if let Some(k) = (0..dual_weights.len()).max_by(|&a, &b| dual_weights[a].total_cmp(&dual_weights[b])) {
        dual_weights[k] += 1.0 - total;
    }
    let model = ScalableModel::svdd(cfg.kernel, support_points, dual_weights, radius_sq)?;
    Ok(model.with_metadata(TrainingMetadata {
        config: cfg.clone(),
        support_indices,
        n_train: data.len(),
        iterations: sol.iterations,
        residual: sol.gap,
    }))
}
