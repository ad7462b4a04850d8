//! Tunnel detection on the DNS traffic surrogate.
//!
//! Each window is summarised by 12 moment features of query size, answer
//! size and response delay. Raising the intensity mixes more tunnel packets
//! into tunnel windows and makes the classes easier to tell apart.

use conformal_safety::conformal::calibrate;
use conformal_safety::data::{gen_dns_surrogate, split, DnsSurrogateSpec, SplitSpec};
use conformal_safety::evaluation::evaluate;
use conformal_safety::kernels::median_heuristic_gamma;
use conformal_safety::trainers::train;
use conformal_safety::{ClassifierKind, KernelSpec, TrainConfig};

fn main() -> conformal_safety::Result<()> {
    for intensity in [0.0, 1.0, 3.0, 10.0] {
        let spec = DnsSurrogateSpec {
            n_windows: 4000,
            intensity,
            seed: 5,
            ..Default::default()
        };
        let data = gen_dns_surrogate(&spec)?;
        let (train_set, calib, test) = split(
            &data,
            &SplitSpec {
                train_fraction: 0.25,
                calib_fraction: 0.25,
                test_fraction: 0.5,
                seed: 6,
            },
        )?;
        let points: Vec<&[f64]> = train_set.iter().map(|s| s.x.as_slice()).collect();
        let gamma = median_heuristic_gamma(&points, 1000)?;
        let cfg = TrainConfig::new(ClassifierKind::Svm, KernelSpec::Gaussian { gamma });
        let model = train(&train_set, &cfg)?;

        let correct = test
            .iter()
            .filter(|s| model.classify(s.x.as_slice(), 0.0).map(|y| y == s.y).unwrap_or(false))
            .count();
        let profile = calibrate(&model, &calib)?;
        let r = evaluate(&model, &profile, 0.1, &test)?;
        println!(
            "intensity {intensity:>4}: accuracy {:.3}, at eps 0.1 err {:.4}, single-set rate {:.3}, safe-set mass {:.3}",
            correct as f64 / test.len() as f64,
            r.err,
            r.single_rate,
            r.csr_mass
        );
    }
    Ok(())
}
