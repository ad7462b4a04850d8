//! Conformal sets and the safe set of a Gaussian-kernel SVM, drawn as a
//! character map.
//!
//! `#` marks the safe set `S_eps`, `+` a `{+1}` set outside it, `-` a `{-1}`
//! set, `o` the double set and a blank the empty set.

use conformal_safety::conformal::{calibrate, quantile};
use conformal_safety::data::{gen_two_gaussians, GaussianSpec};
use conformal_safety::evaluation::{region_grid, Bounds};
use conformal_safety::trainers::train;
use conformal_safety::{ClassifierKind, KernelSpec, TrainConfig};

fn main() -> conformal_safety::Result<()> {
    let train_set = gen_two_gaussians(800, &GaussianSpec::overlapping(10))?;
    let calib = gen_two_gaussians(2000, &GaussianSpec::overlapping(11))?;
    let cfg = TrainConfig::new(ClassifierKind::Svm, KernelSpec::gaussian_default(2));
    let model = train(&train_set, &cfg)?;
    let profile = calibrate(&model, &calib)?;

    let resolution = 48;
    let bounds = Bounds::new(-3.0, 3.0, -3.0, 3.0)?;
    for eps in [0.05, 0.3] {
        let cells = region_grid(&model, &profile, eps, bounds, resolution)?;
        println!("eps = {eps}, s_eps = {:.4}", quantile(&profile, eps)?);
        // cells are row-major with x2 ascending; print the top row first
        for row in cells.chunks(resolution).rev() {
            let line: String = row
                .iter()
                .map(|c| match (c.in_safe_region, c.set.category()) {
                    (true, _) => '#',
                    (false, "plus") => '+',
                    (false, "minus") => '-',
                    (false, "double") => 'o',
                    _ => ' ',
                })
                .collect();
            println!("  {line}");
        }
        let safe = cells.iter().filter(|c| c.in_safe_region).count();
        let sigma = cells.iter().filter(|c| c.in_sigma).count();
        println!("  {safe} cells in S_eps, {sigma} in Sigma_eps\n");
    }
    Ok(())
}
