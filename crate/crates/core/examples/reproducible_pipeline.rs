//! The `csr` command pipeline driven from code, followed by a replay of every
//! manifest.
//!
//! Runs in a scratch directory and prints the files it produced.

use conformal_safety::cli::{run, Cli, RunManifest};

fn csr(args: &str) -> conformal_safety::Result<()> {
    let cli: Cli = clap::Parser::try_parse_from(std::iter::once("csr").chain(args.split_whitespace()))
        .map_err(|e| conformal_safety::Error::Input(e.to_string()))?;
    if let Some(manifest) = run(&cli.command)? {
        let m = RunManifest::load(&manifest)?;
        for out in &m.outputs {
            println!("  {} {}", &out.sha256[..12], out.path.display());
        }
    }
    Ok(())
}

fn main() -> conformal_safety::Result<()> {
    let dir = tempfile::tempdir()?;
    std::env::set_current_dir(dir.path())?;

    csr("generate two-gaussians --n 2000 --cov-scale-safe 1 --cov-scale-unsafe 1 --outlier-prob 0.1 --seed 7 \
         --out data.csv --train-fraction 0.3 --calib-fraction 0.3 --test-fraction 0.4")?;
    csr("train --kind svm --kernel gaussian --gamma 0.5 --C 1 --seed 7 --out model.json data.train.csv")?;
    csr("calibrate --model model.json --out profile.json data.calib.csv")?;
    csr("evaluate --model model.json --profile profile.json --epsilon 0.1 --out report.json data.test.csv")?;
    csr("sweep --model model.json --profile profile.json --out sweep.csv data.test.csv")?;
    csr("region --model model.json --profile profile.json --epsilon 0.1 --bounds -3,3,-3,3 --resolution 40 --out grid.csv")?;

    for manifest in ["data.csv", "model.json", "profile.json", "report.json", "sweep.csv", "grid.csv"] {
        csr(&format!("replay {manifest}.manifest.json"))?;
    }
    println!("{}", std::fs::read_to_string("report.json")?);
    Ok(())
}
