//! The three predictor families, their roots and the conformal score.
//!
//! Models are written down by hand so that every number can be checked on
//! paper: a linear SVM with `w = [1, 0]`, the unit ball as an SVDD and the
//! logistic model sharing the SVM's `w` and `b`.

use conformal_safety::conformal::score;
use conformal_safety::{FeatureVector, KernelSpec, Label, ScalableModel};

fn main() -> conformal_safety::Result<()> {
    let e1 = vec![FeatureVector::new(vec![1.0, 0.0])?];
    let svm = ScalableModel::svm(KernelSpec::Linear, e1.clone(), vec![1.0], 0.0)?;
    let lr = ScalableModel::lr(KernelSpec::Linear, e1, vec![1.0], 0.0)?;
    // center at the origin: a single support point with weight 1
    let svdd = ScalableModel::svdd(KernelSpec::Linear, vec![FeatureVector::new(vec![0.0, 0.0])?], vec![1.0], 1.0)?;

    let points = [[2.0, 0.0], [-0.5, 1.0], [0.3, 0.4], [0.0, 3.0]];
    for (name, m) in [("svm", &svm), ("svdd", &svdd), ("lr", &lr)] {
        println!("{name}");
        for x in &points {
            let rho_bar = m.rho_bar(x)?;
            println!(
                "  x = {x:?}: f(x, 0) = {:+.4}, label {}, rho_bar = {:+.4}, f(x, rho_bar) = {:+.1e}, s(x, +1) = {:+.4}",
                m.predictor(x, 0.0)?,
                m.classify(x, 0.0)?,
                rho_bar,
                m.predictor(x, rho_bar)?,
                score(m, x, Label::Plus)?,
            );
        }
    }

    // the level sets S(rho) = { f(x, rho) < 0 } shrink as rho grows
    let x = [0.3, 0.4];
    for rho in [-1.0, 0.0, 0.5, 0.75, 1.0] {
        println!("x = {x:?} in S({rho}) for svdd: {}", svdd.in_level_set(&x, rho)?);
    }
    Ok(())
}
