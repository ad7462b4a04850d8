//! Error coverage of the three classifiers as `eps` varies.
//!
//! For every `eps` the empirical error stays near or below `eps`, and the
//! fraction of unsafe points landing in the safe set stays below the error.

use conformal_safety::conformal::calibrate;
use conformal_safety::data::{gen_two_gaussians, GaussianSpec};
use conformal_safety::evaluation::{default_epsilon_grid, sweep};
use conformal_safety::trainers::train;
use conformal_safety::{ClassifierKind, KernelSpec, TrainConfig};

fn main() -> conformal_safety::Result<()> {
    let train_set = gen_two_gaussians(1000, &GaussianSpec::overlapping(20))?;
    let calib = gen_two_gaussians(2000, &GaussianSpec::overlapping(21))?;
    let test = gen_two_gaussians(4000, &GaussianSpec::overlapping(22))?;

    let cubic = KernelSpec::Polynomial {
        degree: 3,
        scale: 0.1,
        offset: 1.0,
    };
    let configs = [
        ("svm", TrainConfig::new(ClassifierKind::Svm, KernelSpec::gaussian_default(2))),
        ("svdd", TrainConfig::new(ClassifierKind::Svdd, KernelSpec::gaussian_default(2)).with_c(0.02)),
        ("lr", TrainConfig::new(ClassifierKind::Lr, cubic).with_c(0.01)),
    ];
    for (name, cfg) in configs {
        let model = train(&train_set, &cfg)?;
        let profile = calibrate(&model, &calib)?;
        println!("{name}");
        println!("   eps     s_eps     err  double   empty  csr_err  csr_mass");
        for r in sweep(&model, &profile, &default_epsilon_grid(), &test)? {
            println!(
                "  {:.2} {:>9.4} {:>7.4} {:>7.4} {:>7.4} {:>8.4} {:>9.4}",
                r.epsilon, r.s_eps, r.err, r.double_rate, r.empty_rate, r.csr_error_coverage, r.csr_mass
            );
        }
    }
    Ok(())
}
