//! Conformal prediction sets from a kernel logistic regression.
//!
//! Trains on overlapping Gaussian classes with outliers, calibrates on a
//! held-out set and prints the set for a few points at several `eps`.

use conformal_safety::conformal::{calibrate, conformal_set, quantile};
use conformal_safety::data::{gen_two_gaussians, split, GaussianSpec, SplitSpec};
use conformal_safety::trainers::train;
use conformal_safety::{ClassifierKind, KernelSpec, TrainConfig};

fn main() -> conformal_safety::Result<()> {
    let data = gen_two_gaussians(3000, &GaussianSpec::overlapping(1))?;
    let (train_set, calib, _) = split(
        &data,
        &SplitSpec {
            train_fraction: 0.3,
            calib_fraction: 0.5,
            test_fraction: 0.2,
            seed: 2,
        },
    )?;

    let kernel = KernelSpec::Polynomial {
        degree: 3,
        scale: 0.1,
        offset: 1.0,
    };
    let cfg = TrainConfig::new(ClassifierKind::Lr, kernel).with_c(0.01);
    let model = train(&train_set, &cfg)?;
    let profile = calibrate(&model, &calib)?;
    println!("calibrated on {} scores", profile.n_c());

    let points = [[-2.0, -2.0], [-0.5, -0.5], [0.0, 0.0], [0.6, 0.4], [2.0, 2.0]];
    for eps in [0.05, 0.1, 0.2, 0.4] {
        let s = quantile(&profile, eps)?;
        print!("eps = {eps:<4} s_eps = {s:>8.4}:");
        for x in &points {
            print!("  {:?} -> {:<6}", x, conformal_set(&model, &profile, eps, x)?.category());
        }
        println!();
    }
    Ok(())
}
