//! The `csr` command line.
//!
//! Every command reads its inputs, writes its outputs atomically and then
//! writes a [`RunManifest`] next to its primary output
//! (`<output>.manifest.json`). The manifest stores the exact invocation, the
//! resolved configuration, seeds and SHA-256 checksums of all inputs and
//! outputs. `csr replay <manifest>` re-executes the invocation into a scratch
//! directory and checks that every output is byte-identical.
//!
//! Paths are stored as given on the command line, so replay from the same
//! working directory as the original run.
//!
//! Exit codes: `0` success, `2` input or validation error, `3` solver
//! non-convergence.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::conformal::{calibrate, CalibrationProfile};
use crate::data::{
    gen_dns_surrogate, gen_two_gaussians, load_csv, split, write_csv, DnsSurrogateSpec, GaussianSpec, SplitSpec,
};
use crate::error::{Error, Result};
use crate::evaluation::{default_epsilon_grid, evaluate, region_grid, sweep, write_grid_csv, write_reports_csv, Bounds};
use crate::kernels::{median_heuristic_gamma, KernelSpec};
use crate::model::{LabeledSample, ScalableModel};
use crate::trainers::{train, ClassifierKind, TrainConfig};

#[derive(Debug, Parser)]
#[command(name = "csr", version, about = "Scalable classifiers with conformal safety regions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate a synthetic dataset as CSV.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Train a scalable classifier and write the model JSON.
    Train(TrainArgs),
    /// Score a calibration set and write the calibration profile JSON.
    Calibrate(CalibrateArgs),
    /// Coverage report at one epsilon (JSON, or CSV when the output ends in `.csv`).
    Evaluate(EvaluateArgs),
    /// Coverage reports over an epsilon grid, as CSV.
    Sweep(SweepArgs),
    /// Conformal sets and safety regions on a 2-D grid, as CSV.
    Region(RegionArgs),
    /// Re-run a manifest and verify byte-identical outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerateCommand {
    /// Two isotropic Gaussian classes (`+1` safe, `-1` unsafe).
    TwoGaussians(TwoGaussiansArgs),
    /// Moment features of simulated DNS traffic windows (`+1` tunnel).
    DnsSurrogate(DnsSurrogateArgs),
}

/// Optional exchangeable split written alongside the full dataset as
/// `<out stem>.train.csv`, `.calib.csv` and `.test.csv`.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SplitArgs {
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub calib_fraction: Option<f64>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Shuffle seed for the split; defaults to `--seed`.
    #[arg(long)]
    pub split_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TwoGaussiansArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.0, -1.0])]
    pub mean_safe: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1.0, 1.0])]
    pub mean_unsafe: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub cov_scale_safe: f64,
    #[arg(long, default_value_t = 0.5)]
    pub cov_scale_unsafe: f64,
    #[arg(long, default_value_t = 0.0)]
    pub outlier_prob: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DnsSurrogateArgs {
    #[arg(long)]
    pub windows: usize,
    #[arg(long, default_value_t = 0.5)]
    pub tunnel_fraction: f64,
    #[arg(long, default_value_t = 100)]
    pub packets_per_window: usize,
    #[arg(long, default_value_t = 3.0)]
    pub intensity: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Linear,
    Polynomial,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Training data CSV.
    pub data: PathBuf,
    #[arg(long)]
    pub kind: ClassifierKind,
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// Gaussian width; defaults to `1 / d`.
    #[arg(long, conflicts_with = "gamma_median")]
    pub gamma: Option<f64>,
    /// Gaussian width from the median heuristic on the first 1000 rows.
    #[arg(long)]
    pub gamma_median: bool,
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Calibration data CSV.
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    /// Test data CSV.
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Test data CSV.
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    /// Strictly ascending epsilons in (0, 1); defaults to 0.05, 0.10, ..., 0.50.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RegionArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// `x1_min,x1_max,x2_min,x2_max`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub bounds: Vec<f64>,
    /// Cells per axis.
    #[arg(long)]
    pub resolution: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// A file and its SHA-256 digest (lowercase hex).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: String,
}

impl Artifact {
    pub fn of(path: &Path) -> Result<Self> {
        Ok(Artifact {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }
}

/// Provenance record written beside every command's primary output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub invocation: Command,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<Artifact>,
    pub outputs: Vec<Artifact>,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Result of executing a command, before the manifest is written.
struct Run {
    config: serde_json::Value,
    seeds: BTreeMap<String, u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Writes through a temporary file in the target directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::input(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn csv_bytes(data: &[LabeledSample]) -> Result<Vec<u8>> {
    let mut buf = vec![];
    write_csv(data, &mut buf)?;
    Ok(buf)
}

fn split_paths(out: &Path) -> [PathBuf; 3] {
    ["train.csv", "calib.csv", "test.csv"].map(|ext| out.with_extension(ext))
}

fn resolve_split(args: &SplitArgs, seed: u64) -> Result<Option<SplitSpec>> {
    let fractions = [
        ("--train-fraction", args.train_fraction),
        ("--calib-fraction", args.calib_fraction),
        ("--test-fraction", args.test_fraction),
    ];
    if fractions.iter().all(|(_, f)| f.is_none()) {
        if args.split_seed.is_some() {
            return Err(Error::input("--split-seed needs the three fraction flags"));
        }
        return Ok(None);
    }
    let mut values = [0.0; 3];
    for (slot, (flag, f)) in values.iter_mut().zip(fractions) {
        let f = f.ok_or_else(|| Error::input(format!("{flag} is required when splitting")))?;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::input(format!("{flag} must lie in (0, 1), got {f}")));
        }
        *slot = f;
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::input(format!(
            "--train-fraction + --calib-fraction + --test-fraction must sum to 1, got {total}"
        )));
    }
    Ok(Some(SplitSpec {
        train_fraction: values[0],
        calib_fraction: values[1],
        test_fraction: values[2],
        seed: args.split_seed.unwrap_or(seed),
    }))
}

fn write_dataset(data: &[LabeledSample], out: &Path, split_spec: Option<&SplitSpec>) -> Result<Vec<PathBuf>> {
    write_atomic(out, &csv_bytes(data)?)?;
    let mut outputs = vec![out.to_path_buf()];
    if let Some(spec) = split_spec {
        let (a, b, c) = split(data, spec)?;
        for (part, path) in [a, b, c].iter().zip(split_paths(out)) {
            write_atomic(&path, &csv_bytes(part)?)?;
            outputs.push(path);
        }
    }
    Ok(outputs)
}

fn check_flag(flag: &str, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::input(format!("{flag} {what}")))
    }
}

fn generate(cmd: &GenerateCommand) -> Result<Run> {
    match cmd {
        GenerateCommand::TwoGaussians(a) => {
            check_flag("--outlier-prob", (0.0..1.0).contains(&a.outlier_prob), "must lie in [0, 1)")?;
            check_flag("--cov-scale-safe", a.cov_scale_safe > 0.0, "must be > 0")?;
            check_flag("--cov-scale-unsafe", a.cov_scale_unsafe > 0.0, "must be > 0")?;
            check_flag("--n", a.n >= 2, "must be at least 2")?;
            let split_spec = resolve_split(&a.split, a.seed)?;
            let spec = GaussianSpec {
                mean_safe: a.mean_safe.clone(),
                mean_unsafe: a.mean_unsafe.clone(),
                cov_scale_safe: a.cov_scale_safe,
                cov_scale_unsafe: a.cov_scale_unsafe,
                outlier_prob: a.outlier_prob,
                seed: a.seed,
            };
            let data = gen_two_gaussians(a.n, &spec)?;
            let outputs = write_dataset(&data, &a.out, split_spec.as_ref())?;
            let mut seeds = BTreeMap::from([("seed".to_string(), a.seed)]);
            if let Some(s) = &split_spec {
                seeds.insert("split_seed".into(), s.seed);
            }
            Ok(Run {
                config: json!({ "generator": "two_gaussians", "n": a.n, "spec": spec, "split": split_spec }),
                seeds,
                inputs: vec![],
                outputs,
            })
        }
        GenerateCommand::DnsSurrogate(a) => {
            check_flag("--tunnel-fraction", a.tunnel_fraction > 0.0 && a.tunnel_fraction < 1.0, "must lie in (0, 1)")?;
            check_flag("--packets-per-window", a.packets_per_window >= 8, "must be at least 8")?;
            check_flag("--intensity", a.intensity.is_finite() && a.intensity >= 0.0, "must be >= 0")?;
            check_flag("--windows", a.windows >= 2, "must be at least 2")?;
            let split_spec = resolve_split(&a.split, a.seed)?;
            let spec = DnsSurrogateSpec {
                n_windows: a.windows,
                tunnel_fraction: a.tunnel_fraction,
                packets_per_window: a.packets_per_window,
                intensity: a.intensity,
                seed: a.seed,
            };
            let data = gen_dns_surrogate(&spec)?;
            let outputs = write_dataset(&data, &a.out, split_spec.as_ref())?;
            let mut seeds = BTreeMap::from([("seed".to_string(), a.seed)]);
            if let Some(s) = &split_spec {
                seeds.insert("split_seed".into(), s.seed);
            }
            Ok(Run {
                config: json!({ "generator": "dns_surrogate", "spec": spec, "split": split_spec }),
                seeds,
                inputs: vec![],
                outputs,
            })
        }
    }
}

fn resolve_kernel(a: &TrainArgs, data: &[LabeledSample]) -> Result<KernelSpec> {
    let kernel = match a.kernel {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Polynomial => KernelSpec::Polynomial {
            degree: a.degree,
            scale: a.scale,
            offset: a.offset,
        },
        KernelKind::Gaussian => {
            let gamma = match (a.gamma, a.gamma_median) {
                (Some(g), _) => g,
                (None, true) => {
                    let pts: Vec<&[f64]> = data.iter().map(|s| s.x.as_slice()).collect();
                    median_heuristic_gamma(&pts, 1000)?
                }
                (None, false) => 1.0 / data[0].x.dim() as f64,
            };
            KernelSpec::Gaussian { gamma }
        }
    };
    kernel.validate()?;
    Ok(kernel)
}

fn train_cmd(a: &TrainArgs) -> Result<Run> {
    let data = load_csv(&a.data)?;
    let cfg = TrainConfig {
        kind: a.kind,
        kernel: resolve_kernel(a, &data)?,
        c: a.c,
        tolerance: a.tolerance,
        max_iterations: a.max_iterations,
        learning_rate: a.learning_rate,
        seed: a.seed,
    };
    cfg.validate()?;
    let model = train(&data, &cfg)?;
    write_atomic(&a.out, model.to_json()?.as_bytes())?;
    println!(
        "trained {} model with {} support points -> {}",
        model.variant.name(),
        model.support_points.len(),
        a.out.display()
    );
    Ok(Run {
        config: serde_json::to_value(&cfg)?,
        seeds: BTreeMap::from([("seed".to_string(), a.seed)]),
        inputs: vec![a.data.clone()],
        outputs: vec![a.out.clone()],
    })
}

fn calibrate_cmd(a: &CalibrateArgs) -> Result<Run> {
    let model = ScalableModel::load(&a.model)?;
    let data = load_csv(&a.data)?;
    let profile = calibrate(&model, &data)?;
    write_atomic(&a.out, profile.to_json()?.as_bytes())?;
    println!("calibrated on {} samples -> {}", profile.n_c(), a.out.display());
    Ok(Run {
        config: json!({ "n_c": profile.n_c() }),
        seeds: BTreeMap::new(),
        inputs: vec![a.model.clone(), a.data.clone()],
        outputs: vec![a.out.clone()],
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<Run> {
    let model = ScalableModel::load(&a.model)?;
    let profile = CalibrationProfile::load(&a.profile)?;
    let data = load_csv(&a.data)?;
    let report = evaluate(&model, &profile, a.epsilon, &data)?;
    let bytes = if is_csv(&a.out) {
        let mut buf = vec![];
        write_reports_csv(std::slice::from_ref(&report), &mut buf)?;
        buf
    } else {
        serde_json::to_string_pretty(&report)?.into_bytes()
    };
    write_atomic(&a.out, &bytes)?;
    println!(
        "epsilon {}: err {} (s_eps {}) -> {}",
        report.epsilon,
        report.err,
        report.s_eps,
        a.out.display()
    );
    Ok(Run {
        config: json!({ "epsilon": a.epsilon, "s_eps": report.s_eps, "n_c": profile.n_c() }),
        seeds: BTreeMap::new(),
        inputs: vec![a.model.clone(), a.profile.clone(), a.data.clone()],
        outputs: vec![a.out.clone()],
    })
}

fn sweep_cmd(a: &SweepArgs) -> Result<Run> {
    let model = ScalableModel::load(&a.model)?;
    let profile = CalibrationProfile::load(&a.profile)?;
    let data = load_csv(&a.data)?;
    let grid = a.eps_grid.clone().unwrap_or_else(default_epsilon_grid);
    let reports = sweep(&model, &profile, &grid, &data)?;
    let mut buf = vec![];
    write_reports_csv(&reports, &mut buf)?;
    write_atomic(&a.out, &buf)?;
    println!("{} epsilons -> {}", reports.len(), a.out.display());
    Ok(Run {
        config: json!({ "eps_grid": grid, "n_c": profile.n_c() }),
        seeds: BTreeMap::new(),
        inputs: vec![a.model.clone(), a.profile.clone(), a.data.clone()],
        outputs: vec![a.out.clone()],
    })
}

fn region_cmd(a: &RegionArgs) -> Result<Run> {
    let [x1_min, x1_max, x2_min, x2_max] = <[f64; 4]>::try_from(a.bounds.as_slice())
        .map_err(|_| Error::input("--bounds takes exactly four values: x1_min,x1_max,x2_min,x2_max"))?;
    let bounds = Bounds::new(x1_min, x1_max, x2_min, x2_max)?;
    let model = ScalableModel::load(&a.model)?;
    let profile = CalibrationProfile::load(&a.profile)?;
    let cells = region_grid(&model, &profile, a.epsilon, bounds, a.resolution)?;
    let mut buf = vec![];
    write_grid_csv(&cells, &mut buf)?;
    write_atomic(&a.out, &buf)?;
    println!("{} cells -> {}", cells.len(), a.out.display());
    Ok(Run {
        config: json!({ "epsilon": a.epsilon, "bounds": bounds, "resolution": a.resolution }),
        seeds: BTreeMap::new(),
        inputs: vec![a.model.clone(), a.profile.clone()],
        outputs: vec![a.out.clone()],
    })
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(GenerateCommand::TwoGaussians(_)) => "generate two-gaussians",
            Command::Generate(GenerateCommand::DnsSurrogate(_)) => "generate dns-surrogate",
            Command::Train(_) => "train",
            Command::Calibrate(_) => "calibrate",
            Command::Evaluate(_) => "evaluate",
            Command::Sweep(_) => "sweep",
            Command::Region(_) => "region",
            Command::Replay(_) => "replay",
        }
    }

    fn out_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Command::Generate(GenerateCommand::TwoGaussians(a)) => Some(&mut a.out),
            Command::Generate(GenerateCommand::DnsSurrogate(a)) => Some(&mut a.out),
            Command::Train(a) => Some(&mut a.out),
            Command::Calibrate(a) => Some(&mut a.out),
            Command::Evaluate(a) => Some(&mut a.out),
            Command::Sweep(a) => Some(&mut a.out),
            Command::Region(a) => Some(&mut a.out),
            Command::Replay(_) => None,
        }
    }

    fn execute(&self) -> Result<Run> {
        match self {
            Command::Generate(g) => generate(g),
            Command::Train(a) => train_cmd(a),
            Command::Calibrate(a) => calibrate_cmd(a),
            Command::Evaluate(a) => evaluate_cmd(a),
            Command::Sweep(a) => sweep_cmd(a),
            Command::Region(a) => region_cmd(a),
            Command::Replay(_) => Err(Error::input("replay cannot be nested")),
        }
    }

    fn manifest(&self, run: Run) -> Result<RunManifest> {
        let artifacts = |paths: &[PathBuf]| paths.iter().map(|p| Artifact::of(p)).collect::<Result<Vec<_>>>();
        Ok(RunManifest {
            command: self.name().to_string(),
            invocation: self.clone(),
            config: run.config,
            seeds: run.seeds,
            inputs: artifacts(&run.inputs)?,
            outputs: artifacts(&run.outputs)?,
        })
    }
}

/// Runs one command, writing its outputs and manifest. Returns the manifest
/// path (none for `replay`).
pub fn run(cmd: &Command) -> Result<Option<PathBuf>> {
    if let Command::Replay(a) = cmd {
        replay(&a.manifest)?;
        return Ok(None);
    }
    let run = cmd.execute()?;
    let manifest = cmd.manifest(run)?;
    let path = manifest_path(&manifest.outputs[0].path);
    write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(Some(path))
}

/// Re-executes a manifest's invocation into a scratch directory and checks
/// every output checksum. Inputs must still match their recorded checksums.
pub fn replay(manifest_file: &Path) -> Result<()> {
    let manifest = RunManifest::load(manifest_file)?;
    for input in &manifest.inputs {
        let actual = sha256_file(&input.path)?;
        if actual != input.sha256 {
            return Err(Error::input(format!("input {} changed since the run", input.path.display())));
        }
    }
    let scratch = tempfile::tempdir()?;
    let mut cmd = manifest.invocation.clone();
    let out = cmd
        .out_mut()
        .ok_or_else(|| Error::input("manifest does not describe a replayable command"))?;
    let file_name = out
        .file_name()
        .ok_or_else(|| Error::input("manifest output is not a file path"))?
        .to_owned();
    *out = scratch.path().join(file_name);
    let run = cmd.execute()?;
    if run.outputs.len() != manifest.outputs.len() {
        return Err(Error::input("replay produced a different number of outputs"));
    }
    for (produced, recorded) in run.outputs.iter().zip(&manifest.outputs) {
        if sha256_file(produced)? != recorded.sha256 {
            return Err(Error::input(format!("replay of {} is not byte-identical", recorded.path.display())));
        }
    }
    println!("replayed `{}`: {} outputs byte-identical", manifest.command, manifest.outputs.len());
    Ok(())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } => 3,
        _ => 2,
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli.command) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
