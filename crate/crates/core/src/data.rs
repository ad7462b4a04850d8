//! Synthetic datasets, exchangeable splits and CSV IO.
//!
//! All randomness comes from `ChaCha20Rng::seed_from_u64(seed)`, so every
//! generator is a pure function of its spec.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureVector, Label, LabeledSample};

/// The generator used throughout the crate.
pub type DataRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> DataRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Two isotropic Gaussian classes with optional covariate outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean_safe: Vec<f64>,
    pub mean_unsafe: Vec<f64>,
    /// Covariance of the safe class is `cov_scale_safe * I`.
    pub cov_scale_safe: f64,
    pub cov_scale_unsafe: f64,
    /// Probability that a sample's features are drawn from the other class.
    pub outlier_prob: f64,
    pub seed: u64,
}

impl GaussianSpec {
    /// Safe class at `[-1, -1]`, unsafe at `[1, 1]`, covariance `I/2`, no outliers.
    pub fn separated(seed: u64) -> Self {
        GaussianSpec {
            mean_safe: vec![-1.0, -1.0],
            mean_unsafe: vec![1.0, 1.0],
            cov_scale_safe: 0.5,
            cov_scale_unsafe: 0.5,
            outlier_prob: 0.0,
            seed,
        }
    }

    /// Same means, unit covariance and 10% outliers per class.
    pub fn overlapping(seed: u64) -> Self {
        GaussianSpec {
            cov_scale_safe: 1.0,
            cov_scale_unsafe: 1.0,
            outlier_prob: 0.1,
            ..Self::separated(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean_safe.is_empty() || self.mean_safe.len() != self.mean_unsafe.len() {
            return Err(Error::input("class means must be nonempty and of equal dimension"));
        }
        if self.mean_safe.iter().chain(&self.mean_unsafe).any(|v| !v.is_finite()) {
            return Err(Error::input("class means must be finite"));
        }
        for (name, s) in [("cov_scale_safe", self.cov_scale_safe), ("cov_scale_unsafe", self.cov_scale_unsafe)] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::input(format!("{name} must be finite and > 0")));
            }
        }
        if !(0.0..1.0).contains(&self.outlier_prob) {
            return Err(Error::input("outlier_prob must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Draws `n` samples: `n - n/2` labelled `+1` followed by `n/2` labelled `-1`.
pub fn gen_two_gaussians(n: usize, spec: &GaussianSpec) -> Result<Vec<LabeledSample>> {
    if n < 2 {
        return Err(Error::input("need at least 2 samples"));
    }
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let sd_safe = spec.cov_scale_safe.sqrt();
    let sd_unsafe = spec.cov_scale_unsafe.sqrt();
    let n_minus = n / 2;
    let n_plus = n - n_minus;

    let mut out = Vec::with_capacity(n);
    for (label, count) in [(Label::Plus, n_plus), (Label::Minus, n_minus)] {
        for _ in 0..count {
            let outlier = rng.random::<f64>() < spec.outlier_prob;
            let draw_safe = (label == Label::Plus) != outlier;
            let (mean, sd) = if draw_safe {
                (&spec.mean_safe, sd_safe)
            } else {
                (&spec.mean_unsafe, sd_unsafe)
            };
            let x: Vec<f64> = mean.iter().map(|m| m + sd * std_normal.sample(&mut rng)).collect();
            out.push(LabeledSample {
                x: FeatureVector::new(x)?,
                y: label,
            });
        }
    }
    Ok(out)
}

/// Windows of simulated DNS query/answer traffic summarised by moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnsSurrogateSpec {
    pub n_windows: usize,
    /// Fraction of windows carrying a tunnel (label `+1`).
    pub tunnel_fraction: f64,
    pub packets_per_window: usize,
    /// Anomalous-packet modulation: a tunnel window replaces a fraction
    /// `min(1, intensity / 10)` of its packets with tunnel traffic.
    pub intensity: f64,
    pub seed: u64,
}

impl Default for DnsSurrogateSpec {
    fn default() -> Self {
        DnsSurrogateSpec {
            n_windows: 10_000,
            tunnel_fraction: 0.5,
            packets_per_window: 100,
            intensity: 3.0,
            seed: 0,
        }
    }
}

/// Summary statistics with population normalizers and raw (non-excess) kurtosis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

pub fn sample_moments(values: &[f64]) -> Result<Moments> {
    if values.len() < 2 {
        return Err(Error::input("moments need at least two values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / n;
    if variance <= 0.0 {
        return Ok(Moments {
            mean,
            variance: 0.0,
            skewness: 0.0,
            kurtosis: 0.0,
        });
    }
    Ok(Moments {
        mean,
        variance,
        skewness: (m3 / n) / variance.powf(1.5),
        kurtosis: (m4 / n) / (variance * variance),
    })
}

/// Packet-level distributions. Sizes are in units of 100 bytes, delays in
/// units of 10 ms.
struct TrafficModel {
    query: LogNormal<f64>,
    answer: LogNormal<f64>,
    delay: Exp<f64>,
    tunnel_query: LogNormal<f64>,
    tunnel_answer: LogNormal<f64>,
    tunnel_delay: Normal<f64>,
}

impl TrafficModel {
    fn new() -> Self {
        TrafficModel {
            query: LogNormal::new(0.4f64.ln(), 0.3).expect("valid"),
            answer: LogNormal::new(1.2f64.ln(), 0.5).expect("valid"),
            delay: Exp::new(1.0).expect("valid"),
            tunnel_query: LogNormal::new(1.0f64.ln(), 0.15).expect("valid"),
            tunnel_answer: LogNormal::new(1.8f64.ln(), 0.2).expect("valid"),
            tunnel_delay: Normal::new(0.6, 0.05).expect("valid"),
        }
    }
}

impl DnsSurrogateSpec {
    pub fn validate(&self) -> Result<usize> {
        if self.n_windows < 2 {
            return Err(Error::input("n_windows must be at least 2"));
        }
        if !(self.tunnel_fraction > 0.0 && self.tunnel_fraction < 1.0) {
            return Err(Error::input("tunnel_fraction must lie in (0, 1)"));
        }
        if self.packets_per_window < 8 {
            return Err(Error::input("packets_per_window must be at least 8"));
        }
        if !(self.intensity.is_finite() && self.intensity >= 0.0) {
            return Err(Error::input("intensity must be finite and >= 0"));
        }
        let n_tunnel = (self.n_windows as f64 * self.tunnel_fraction).round() as usize;
        if n_tunnel == 0 || n_tunnel == self.n_windows {
            return Err(Error::input("tunnel_fraction leaves one class empty"));
        }
        Ok(n_tunnel)
    }
}

/// One window's 12 features:
/// `[m_A, m_Q, m_Dt, v_A, v_Q, v_Dt, s_A, s_Q, s_Dt, k_A, k_Q, k_Dt]`.
pub fn window_features(answers: &[f64], queries: &[f64], delays: &[f64]) -> Result<Vec<f64>> {
    let a = sample_moments(answers)?;
    let q = sample_moments(queries)?;
    let t = sample_moments(delays)?;
    Ok(vec![
        a.mean, q.mean, t.mean, a.variance, q.variance, t.variance, a.skewness, q.skewness, t.skewness, a.kurtosis,
        q.kurtosis, t.kurtosis,
    ])
}

pub fn gen_dns_surrogate(spec: &DnsSurrogateSpec) -> Result<Vec<LabeledSample>> {
    let n_tunnel = spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let model = TrafficModel::new();
    let mix = (spec.intensity / 10.0).min(1.0);

    let mut labels: Vec<Label> = (0..spec.n_windows)
        .map(|i| if i < n_tunnel { Label::Plus } else { Label::Minus })
        .collect();
    labels.shuffle(&mut rng);

    let k = spec.packets_per_window;
    let (mut q, mut a, mut dt) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    labels
        .into_iter()
        .map(|label| {
            for p in 0..k {
                let anomalous = label == Label::Plus && rng.random::<f64>() < mix;
                if anomalous {
                    q[p] = model.tunnel_query.sample(&mut rng);
                    a[p] = model.tunnel_answer.sample(&mut rng);
                    dt[p] = model.tunnel_delay.sample(&mut rng).abs();
                } else {
                    q[p] = model.query.sample(&mut rng);
                    a[p] = model.answer.sample(&mut rng);
                    dt[p] = model.delay.sample(&mut rng);
                }
            }
            Ok(LabeledSample {
                x: FeatureVector::new(window_features(&a, &q, &dt)?)?,
                y: label,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub calib_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("train_fraction", self.train_fraction),
            ("calib_fraction", self.calib_fraction),
            ("test_fraction", self.test_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::input(format!("{name} must lie in (0, 1), got {f}")));
            }
        }
        let total = self.train_fraction + self.calib_fraction + self.test_fraction;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("split fractions sum to {total}, expected 1")));
        }
        Ok(())
    }
}

/// `floor(n * f)`, treating products within `1e-9` of an integer as that integer.
fn part_size(n: usize, f: f64) -> usize {
    let x = n as f64 * f;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

pub type Split = (Vec<LabeledSample>, Vec<LabeledSample>, Vec<LabeledSample>);

/// Shuffles under the seed and cuts into train / calibration / test parts.
pub fn split(data: &[LabeledSample], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::input("cannot split an empty dataset"));
    }
    let n = data.len();
    let n_train = part_size(n, spec.train_fraction);
    let n_calib = part_size(n, spec.calib_fraction);
    if n_train == 0 || n_calib == 0 || n_train + n_calib >= n {
        return Err(Error::input(format!(
            "split of {n} samples leaves a part empty (train {n_train}, calib {n_calib})"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(spec.seed));
    let take = |r: std::ops::Range<usize>| idx[r].iter().map(|&i| data[i].clone()).collect::<Vec<_>>();
    Ok((take(0..n_train), take(n_train..n_train + n_calib), take(n_train + n_calib..n)))
}

/// Parses the `f1,...,fd,label` format.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<LabeledSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::input("empty CSV file (no header)")),
    };
    let d = header.len().saturating_sub(1);
    let header_ok = d >= 1
        && header.iter().take(d).enumerate().all(|(i, h)| h == format!("f{}", i + 1))
        && header.get(d) == Some("label");
    if !header_ok {
        return Err(Error::input("line 1: header must be `f1,...,fd,label`"));
    }
    let mut out = vec![];
    for rec in records {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != d + 1 {
            return Err(Error::input(format!(
                "line {line}: expected {} fields, found {}",
                d + 1,
                rec.len()
            )));
        }
        let mut x = Vec::with_capacity(d);
        for (i, field) in rec.iter().take(d).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::input(format!("line {line}: f{} is not a number: `{field}`", i + 1)))?;
            if !v.is_finite() {
                return Err(Error::input(format!("line {line}: f{} is not finite", i + 1)));
            }
            x.push(v);
        }
        let y = match &rec[d] {
            "1" => Label::Plus,
            "-1" => Label::Minus,
            other => return Err(Error::input(format!("line {line}: label must be -1 or 1, got `{other}`"))),
        };
        out.push(LabeledSample {
            x: FeatureVector::new(x)?,
            y,
        });
    }
    if out.is_empty() {
        return Err(Error::input("CSV file has a header but no samples"));
    }
    Ok(out)
}

pub fn write_csv<W: Write>(data: &[LabeledSample], out: W) -> Result<()> {
    let d = data
        .first()
        .map(|s| s.x.dim())
        .ok_or_else(|| Error::input("cannot write an empty dataset"))?;
    if data.iter().any(|s| s.x.dim() != d) {
        return Err(Error::input("inconsistent sample dimensions"));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(d + 1);
    for s in data {
        row.clear();
        row.extend(s.x.as_slice().iter().map(|v| v.to_string()));
        row.push(s.y.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    read_csv(BufReader::new(File::open(path)?))
}

pub fn save_csv(data: &[LabeledSample], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(data, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn class_means_without_outliers() {
        let spec = GaussianSpec {
            outlier_prob: 0.0,
            ..GaussianSpec::overlapping(3)
        };
        let data = gen_two_gaussians(10_000, &spec).unwrap();
        for (label, target) in [(Label::Plus, -1.0), (Label::Minus, 1.0)] {
            let pts: Vec<_> = data.iter().filter(|s| s.y == label).collect();
            assert_eq!(pts.len(), 5000);
            for d in 0..2 {
                let m = pts.iter().map(|s| s.x.as_slice()[d]).sum::<f64>() / pts.len() as f64;
                assert!((m - target).abs() < 0.05, "{m}");
            }
        }
    }

    #[test]
    fn outlier_overlap_matches_monte_carlo_oracle() {
        let mu_s = [-1.0, -1.0];
        let mu_u = [1.0, 1.0];
        let nearer_unsafe = |x: &[f64]| {
            let d = |m: &[f64; 2]| (x[0] - m[0]).powi(2) + (x[1] - m[1]).powi(2);
            d(&mu_u) < d(&mu_s)
        };
        // direct simulation of the mechanism: swap the source distribution w.p. 0.1
        let mut rng = ChaCha20Rng::seed_from_u64(0xfeed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let draws = 1_000_000;
        let hits = (0..draws)
            .filter(|_| {
                let center = if rng.random::<f64>() < 0.1 { mu_u } else { mu_s };
                let x = [center[0] + normal.sample(&mut rng), center[1] + normal.sample(&mut rng)];
                nearer_unsafe(&x)
            })
            .count();
        let oracle = hits as f64 / draws as f64;
        // 0.9 Phi(-sqrt 2) + 0.1 (1 - Phi(-sqrt 2))
        let phi = 0.078_649_603_525_142_6;
        assert!((oracle - (0.9 * phi + 0.1 * (1.0 - phi))).abs() < 0.002, "{oracle}");

        let data = gen_two_gaussians(200_000, &GaussianSpec::overlapping(9)).unwrap();
        let plus: Vec<_> = data.iter().filter(|s| s.y == Label::Plus).collect();
        let frac = plus.iter().filter(|s| nearer_unsafe(s.x.as_slice())).count() as f64 / plus.len() as f64;
        assert!((frac - oracle).abs() < 0.01, "generator {frac} vs oracle {oracle}");
    }

    #[test]
    fn odd_counts_favour_plus() {
        let data = gen_two_gaussians(7, &GaussianSpec::separated(0)).unwrap();
        assert_eq!(data.iter().filter(|s| s.y == Label::Plus).count(), 4);
        assert!(gen_two_gaussians(1, &GaussianSpec::separated(0)).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = gen_two_gaussians(100, &GaussianSpec::overlapping(42)).unwrap();
        assert_eq!(a, gen_two_gaussians(100, &GaussianSpec::overlapping(42)).unwrap());
        assert_ne!(a, gen_two_gaussians(100, &GaussianSpec::overlapping(43)).unwrap());
        let spec = DnsSurrogateSpec {
            n_windows: 50,
            ..DnsSurrogateSpec::default()
        };
        assert_eq!(gen_dns_surrogate(&spec).unwrap(), gen_dns_surrogate(&spec).unwrap());
    }

    #[test]
    fn moments_examples() {
        let m = sample_moments(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m, Moments { mean: 1.0, variance: 0.0, skewness: 0.0, kurtosis: 0.0 });
        let m = sample_moments(&[-1.0, 1.0]).unwrap();
        assert_eq!((m.mean, m.variance, m.skewness, m.kurtosis), (0.0, 1.0, 0.0, 1.0));
        let m = sample_moments(&[-3.0, -1.5, 0.0, 1.5, 3.0]).unwrap();
        assert!(m.skewness.abs() <= 1e-12);
        assert!(sample_moments(&[1.0]).is_err());
    }

    #[test]
    fn constant_window_has_zero_variance() {
        let f = window_features(&[2.0; 8], &[0.5; 8], &[1.0; 8]).unwrap();
        assert_eq!(f.len(), 12);
        assert_eq!(&f[3..6], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn dns_spec_validation() {
        let ok = DnsSurrogateSpec::default();
        assert!(gen_dns_surrogate(&DnsSurrogateSpec { packets_per_window: 7, ..ok.clone() }).is_err());
        assert!(gen_dns_surrogate(&DnsSurrogateSpec { tunnel_fraction: 1.0, ..ok.clone() }).is_err());
        assert!(gen_dns_surrogate(&DnsSurrogateSpec { intensity: -1.0, ..ok.clone() }).is_err());
        assert!(gen_dns_surrogate(&DnsSurrogateSpec { n_windows: 1, ..ok }).is_err());
    }

    #[test]
    fn dns_features_have_twelve_columns() {
        let data = gen_dns_surrogate(&DnsSurrogateSpec { n_windows: 20, ..Default::default() }).unwrap();
        assert!(data.iter().all(|s| s.x.dim() == 12));
        assert_eq!(data.iter().filter(|s| s.y == Label::Plus).count(), 10);
    }

    #[test]
    fn split_sizes_and_partition() {
        let data: Vec<_> = (0..10)
            .map(|i| LabeledSample::new(vec![i as f64], if i % 2 == 0 { Label::Plus } else { Label::Minus }).unwrap())
            .collect();
        let spec = SplitSpec { train_fraction: 0.5, calib_fraction: 0.3, test_fraction: 0.2, seed: 1 };
        let (a, b, c) = split(&data, &spec).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (5, 3, 2));
        let mut all: Vec<f64> = a.iter().chain(&b).chain(&c).map(|s| s.x.as_slice()[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(|i| i as f64).collect::<Vec<_>>());
        assert_eq!(split(&data, &spec).unwrap(), (a.clone(), b, c));
        let other = split(&data, &SplitSpec { seed: 2, ..spec }).unwrap();
        assert_ne!(other.0, a);
    }

    #[test]
    fn split_rejects_bad_fractions() {
        let data = vec![LabeledSample::new(vec![0.0], Label::Plus).unwrap(); 10];
        let bad = SplitSpec { train_fraction: 0.5, calib_fraction: 0.3, test_fraction: 0.3, seed: 0 };
        assert!(split(&data, &bad).is_err());
        let tiny = SplitSpec { train_fraction: 0.05, calib_fraction: 0.05, test_fraction: 0.9, seed: 0 };
        assert!(split(&data, &tiny).is_err());
        assert!(split(&[], &SplitSpec { train_fraction: 0.5, calib_fraction: 0.25, test_fraction: 0.25, seed: 0 }).is_err());
    }

    #[test]
    fn csv_rejections() {
        let e = read_csv("f1,label\n0.5,1\n0.2,0\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(read_csv("f1,f2,label\n".as_bytes()).is_err());
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("x,label\n1,1\n".as_bytes()).is_err());
        let e = read_csv("f1,f2,label\n1,2,1\n1,1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(read_csv("f1,label\nabc,1\n".as_bytes()).is_err());
        assert!(read_csv("f1,label\n1,+1\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip_of_generated_data() {
        let data = gen_two_gaussians(100, &GaussianSpec::overlapping(5)).unwrap();
        let mut buf = vec![];
        write_csv(&data, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("f1,f2,label\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), data);
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec((prop::collection::vec(-1e6f64..1e6, 3), any::<bool>()), 1..20)) {
            let data: Vec<_> = rows
                .into_iter()
                .map(|(x, p)| LabeledSample::new(x, if p { Label::Plus } else { Label::Minus }).unwrap())
                .collect();
            let mut buf = vec![];
            write_csv(&data, &mut buf).unwrap();
            prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), data);
        }

        #[test]
        fn moments_match_naive_sums(values in prop::collection::vec(-100.0f64..100.0, 2..50)) {
            let m = sample_moments(&values).unwrap();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let c = |p: i32| values.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
            let var = c(2);
            prop_assert!((m.mean - mean).abs() <= 1e-12 * (1.0 + mean.abs()));
            prop_assert!((m.variance - var).abs() <= 1e-12 * (1.0 + var));
            if var > 1e-9 {
                prop_assert!((m.skewness - c(3) / var.powf(1.5)).abs() <= 1e-9);
                prop_assert!((m.kurtosis - c(4) / (var * var)).abs() <= 1e-9);
            }
        }
    }
}
