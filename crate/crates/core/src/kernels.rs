//! Kernel functions standing in for the feature map.
//!
//! The feature map is only ever used through inner products, so a
//! [`KernelSpec`] is all a model needs to evaluate `<phi(u), phi(v)>`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inner product in feature space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `<u, v>`
    Linear,
    /// `(scale * <u, v> + offset)^degree`
    Polynomial { degree: u32, scale: f64, offset: f64 },
    /// `exp(-gamma * |u - v|^2)`
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    /// Cubic kernel `(<u, v> + 1)^3`.
    pub fn cubic() -> Self {
        KernelSpec::Polynomial {
            degree: 3,
            scale: 1.0,
            offset: 1.0,
        }
    }

    /// Gaussian kernel with the default width `gamma = 1 / dim`.
    pub fn gaussian_default(dim: usize) -> Self {
        KernelSpec::Gaussian {
            gamma: 1.0 / dim.max(1) as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial {
                degree,
                scale,
                offset,
            } => {
                if degree < 1 {
                    return Err(Error::input("polynomial degree must be >= 1"));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::input("polynomial scale must be finite and > 0"));
                }
                if !(offset.is_finite() && offset >= 0.0) {
                    return Err(Error::input("polynomial offset must be finite and >= 0"));
                }
                Ok(())
            }
            KernelSpec::Gaussian { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::input("gaussian gamma must be finite and > 0"))
                }
            }
        }
    }

    /// Kernel value without the dimension check. Callers guarantee equal lengths.
    #[inline]
    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(u, v),
            KernelSpec::Polynomial {
                degree,
                scale,
                offset,
            } => (scale * dot(u, v) + offset).powi(degree as i32),
            KernelSpec::Gaussian { gamma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[inline]
fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Evaluates `k(u, v)`.
pub fn kernel_eval(k: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::input(format!(
            "kernel dimension mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(k.eval_unchecked(u, v))
}

/// Dense symmetric Gram matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `G v`, rows computed in parallel. Each row is a sequential dot product,
    /// so the result does not depend on the thread count.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        self.data
            .par_chunks(self.n)
            .map(|row| dot(row, v))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Builds `G[i][j] = k(x_i, x_j)` for all pairs.
pub fn gram_matrix<P: AsRef<[f64]> + Sync>(k: &KernelSpec, points: &[P]) -> Result<GramMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(Error::input("gram matrix of an empty point set"));
    }
    let dim = points[0].as_ref().len();
    if let Some(i) = points.iter().position(|p| p.as_ref().len() != dim) {
        return Err(Error::input(format!(
            "point {i} has dimension {} (expected {dim})",
            points[i].as_ref().len()
        )));
    }
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let xi = points[i].as_ref();
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = k.eval_unchecked(xi, points[j].as_ref());
        }
    });
    // Enforce exact symmetry for kernels where evaluation order matters in the last bit.
    for i in 0..n {
        for j in 0..i {
            data[j * n + i] = data[i * n + j];
        }
    }
    Ok(GramMatrix { n, data })
}

/// Median heuristic for the Gaussian width: `gamma = 1 / median(|x_i - x_j|^2)`
/// over the first `max_points` points (all pairs). Falls back to `1 / dim`
/// when every pairwise distance is zero.
pub fn median_heuristic_gamma<P: AsRef<[f64]>>(points: &[P], max_points: usize) -> Result<f64> {
    let m = points.len().min(max_points.max(2));
    if m < 2 {
        return Err(Error::input("median heuristic needs at least two points"));
    }
    let mut d2 = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in 0..i {
            let u = points[i].as_ref();
            let v = points[j].as_ref();
            if u.len() != v.len() {
                return Err(Error::input("median heuristic: inconsistent dimensions"));
            }
            d2.push(u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
        }
    }
    d2.sort_by(f64::total_cmp);
    let med = d2[d2.len() / 2];
    if med > 0.0 {
        Ok(1.0 / med)
    } else {
        Ok(1.0 / points[0].as_ref().len().max(1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn linear_is_dot_product() {
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn gaussian_at_zero_distance_is_one() {
        let k = KernelSpec::Gaussian { gamma: 0.5 };
        assert_eq!(kernel_eval(&k, &[7.0, -3.0], &[7.0, -3.0]).unwrap(), 1.0);
    }

    #[test]
    fn cubic_kernel() {
        // <u, v> = 1
        let v = kernel_eval(&KernelSpec::cubic(), &[1.0, 0.0], &[1.0, 5.0]).unwrap();
        assert_eq!(v, 8.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(matches!(
            kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]),
            Err(Error::Input(_))
        ));
        assert!(gram_matrix(&KernelSpec::Linear, &[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(KernelSpec::Gaussian { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 0, scale: 1.0, offset: 1.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 2, scale: 0.0, offset: 1.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 2, scale: 1.0, offset: -1.0 }.validate().is_err());
        assert!(KernelSpec::cubic().validate().is_ok());
    }

    #[test]
    fn gram_identity_and_empty() {
        let g = gram_matrix(&KernelSpec::Linear, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(gram_matrix(&KernelSpec::Linear, &empty).is_err());
    }

    #[test]
    fn gram_gaussian_diagonal_is_one() {
        let pts = random_points(7, 3, 4);
        let g = gram_matrix(&KernelSpec::Gaussian { gamma: 0.7 }, &pts).unwrap();
        assert!(g.diagonal().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn gram_linear_matches_double_loop() {
        let pts = random_points(3, 5, 11);
        let g = gram_matrix(&KernelSpec::Linear, &pts).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
                assert!((g.get(i, j) - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_is_psd_on_small_sets() {
        let kernels = [
            KernelSpec::Linear,
            KernelSpec::cubic(),
            KernelSpec::Gaussian { gamma: 0.5 },
        ];
        for (s, k) in kernels.iter().enumerate() {
            for n in 2..=10 {
                let pts = random_points(n, 3, 100 + s as u64 * 10 + n as u64);
                let g = gram_matrix(k, &pts).unwrap().to_rows();
                let min_eig = jacobi_eigenvalues(g).into_iter().fold(f64::INFINITY, f64::min);
                let scale = 1.0f64.max(pts.len() as f64);
                assert!(min_eig >= -1e-8 * scale, "{k:?} n={n}: {min_eig}");
            }
        }
    }

    #[test]
    fn median_heuristic() {
        let pts = vec![vec![0.0], vec![1.0], vec![3.0]];
        // squared distances 1, 4, 9 -> median 4
        assert_eq!(median_heuristic_gamma(&pts, 100).unwrap(), 0.25);
    }

    proptest! {
        #[test]
        fn symmetry(u in prop::collection::vec(-5.0f64..5.0, 3), v in prop::collection::vec(-5.0f64..5.0, 3), gamma in 0.01f64..3.0) {
            for k in [KernelSpec::Linear, KernelSpec::cubic()] {
                prop_assert_eq!(kernel_eval(&k, &u, &v).unwrap(), kernel_eval(&k, &v, &u).unwrap());
            }
            let k = KernelSpec::Gaussian { gamma };
            let a = kernel_eval(&k, &u, &v).unwrap();
            let b = kernel_eval(&k, &v, &u).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a > 0.0 && a <= 1.0);
        }
    }

    fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect()
    }

    /// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
    #[allow(clippy::needless_range_loop)]
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-22 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][i]).collect()
    }
}
