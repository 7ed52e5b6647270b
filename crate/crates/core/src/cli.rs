//! Command-line front end.
//!
//! Every subcommand computes its outputs in memory and then writes them
//! together with a JSON manifest. `replay` recomputes a run from its
//! manifest and checks the output hashes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::color::{featurize, ColorSpaceId};
use crate::data::{ingest_csv, summarize, Dataset, Label};
use crate::ensemble::{abstention_sweep, majority_predict, sweep_to_csv, sweep_to_text, triage_csv, train_ensemble, AbstentionRule, EnsembleModel, ENSEMBLE_FORMAT, ENSEMBLE_SIZE};
use crate::error::Error;
use crate::experiment::{run_repeated, ExperimentPlan, Tuning};
use crate::learners::{grid_search, train, Family, HyperGrid, ModelConfig, TrainedModel, MODEL_FORMAT};
use crate::metrics::{confusion, metric_set, roc_curve, threshold_scores, ConfusionMatrix, DEFAULT_THRESHOLD};
use crate::plot::{heatmap_svg, ColorScale};
use crate::stats::{correlation_matrix, group_difference_table, CorrelationMatrix, PValueTable, TTestVariant, Variable};
use crate::synth::{generate_with_report, SynthConfig};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "stripscreen",
    version,
    about = "Urine test-strip screening: ingestion, statistics, learners, the 11-space vote ensemble and synthetic data.",
    after_help = "Exit codes: 0 success, 1 usage, 2 data, 3 runtime. Errors are printed as one line: `error[<kind>]: <message>`."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice [env: STRIPSCREEN_SEED; default: 0, for synth the config's own seed]
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Worker threads, 0 means one per core. Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Sample CSV
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Abort on the first invalid row instead of dropping it
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a sample CSV and print a summary
    Validate {
        #[command(flatten)]
        input: InputArgs,
        /// Also write rejections.csv and a manifest here
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Dataset statistics, gender and clinical tables, and RGB p-values
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        /// Write the tables here instead of only printing them
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Per-channel p-values and the urine and clinical correlation matrices
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Color space of the p-value table and urine correlations
        #[arg(long, value_name = "NAME", default_value = "rgb")]
        space: ColorSpaceId,
        /// welch or pooled
        #[arg(long, value_name = "NAME", default_value = "welch", value_parser = parse_variant)]
        variant: TTestVariant,
    },
    /// Fit one model on the whole input
    Train {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Color space
        #[arg(long, value_name = "NAME")]
        space: ColorSpaceId,
        /// mlp, logreg, rf or gb
        #[arg(long, value_name = "NAME", default_value = "mlp")]
        family: Family,
        /// Hyperparameter TOML: `family`, `seed` and the family's parameters
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// fixed, or grid-once for a cross-validated search on the input first
        #[arg(long, value_name = "MODE", default_value = "fixed")]
        tuning: Tuning,
        /// Folds for the grid search
        #[arg(long, value_name = "N", default_value_t = 3)]
        folds: usize,
    },
    /// Repeated random-split evaluation, or one saved model on the input
    Eval {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Score this saved model or ensemble on every input row instead
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Comma-separated spaces [default: all 11]
        #[arg(long, value_name = "NAME", value_delimiter = ',')]
        space: Vec<ColorSpaceId>,
        /// Comma-separated families [default: all four]
        #[arg(long, value_name = "NAME", value_delimiter = ',')]
        family: Vec<Family>,
        /// Random train/test splits
        #[arg(long, value_name = "N", default_value_t = 30)]
        reps: usize,
        /// Share of samples held out per split
        #[arg(long, value_name = "F", default_value_t = 0.1)]
        test_fraction: f64,
        /// fixed, grid-once or grid-per-rep
        #[arg(long, value_name = "MODE", default_value = "grid-once")]
        tuning: Tuning,
        /// Cross-validation folds for the grid search
        #[arg(long, value_name = "N", default_value_t = 3)]
        folds: usize,
        /// Hyperparameter TOML for one family
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Add a vote-ensemble row and sweep built from this family (needs all 11 spaces)
        #[arg(long, value_name = "NAME")]
        ensemble: Option<Family>,
        /// symmetric or asymmetric
        #[arg(long, value_name = "RULE", default_value = "symmetric")]
        rule: AbstentionRule,
    },
    /// Fit one member per color space on the whole input
    Ensemble {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Member family: mlp, logreg, rf or gb
        #[arg(long, value_name = "NAME", default_value = "mlp")]
        family: Family,
        /// Hyperparameter TOML: `family`, `seed` and the family's parameters
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Per-sample decisions of a saved ensemble at one threshold
    Triage {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Saved ensemble
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Vote threshold
        #[arg(long, value_name = "INT", default_value_t = 6, value_parser = clap::value_parser!(u8).range(6..=11))]
        k: u8,
        /// symmetric or asymmetric
        #[arg(long, value_name = "RULE", default_value = "symmetric")]
        rule: AbstentionRule,
    },
    /// Abstention sweep of a saved ensemble over k = 6..11
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Saved ensemble
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// symmetric or asymmetric
        #[arg(long, value_name = "RULE", default_value = "symmetric")]
        rule: AbstentionRule,
    },
    /// ROC curve of a saved model (probability) or ensemble (vote fraction)
    Roc {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Saved model or ensemble
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
    },
    /// Generate a synthetic sample CSV
    Synth {
        /// Synth TOML config
        #[arg(long, value_name = "PATH", required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// separable, paper-like or null
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
        /// Override the config's sample count
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Output CSV; the manifest goes next to it
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Recompute a run from its manifest and compare output hashes
    Replay {
        /// A manifest.json written by an earlier run
        #[arg(long, value_name = "PATH")]
        manifest: PathBuf,
        /// Also write the recomputed outputs here
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn parse_variant(s: &str) -> Result<TTestVariant, String> {
    match s {
        "welch" => Ok(TTestVariant::Welch),
        "pooled" => Ok(TTestVariant::Pooled),
        _ => Err(format!("unknown variant '{s}' (welch or pooled)")),
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: msg.into() }
    }

    fn runtime(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_RUNTIME, message: msg.into() }
    }

    fn kind(&self) -> &'static str {
        match self.code {
            EXIT_USAGE => "usage",
            EXIT_DATA => "data",
            _ => "runtime",
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) => EXIT_USAGE,
            Error::Data(_) | Error::Format(_) => EXIT_DATA,
            Error::Degenerate(_) | Error::Io { .. } => EXIT_RUNTIME,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Written next to every run's outputs. Thread count and wall-clock time
/// are left out so the manifest itself is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments that reproduce the run, without `--out` and `--workers`.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<FileHash>,
    /// Paths relative to the manifest's directory.
    pub outputs: Vec<FileHash>,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> crate::Result<RunManifest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("manifest {}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// What a handler produced, before anything touches the disk.
struct Run {
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<(String, Vec<u8>)>,
    stdout: String,
}

impl Run {
    fn new(config: impl Serialize, seed: Option<u64>, inputs: Vec<PathBuf>) -> CliResult<Run> {
        let config = serde_json::to_value(config).map_err(|e| Failure::runtime(format!("cannot serialize config: {e}")))?;
        Ok(Run {
            config,
            seed,
            inputs,
            outputs: Vec::new(),
            stdout: String::new(),
        })
    }

    fn file(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.outputs.push((name.to_string(), bytes.into()));
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli, &argv) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind(), f.message.replace('\n', " "));
            f.code
        }
    }
}

fn execute(cli: &Cli, argv: &[OsString]) -> CliResult<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Failure::runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        if let Command::Replay { manifest, out } = &cli.command {
            return replay(manifest, out.as_deref());
        }
        let seed = cli.seed.or(env_seed()?);
        let run = run_command(&cli.command, seed)?;
        let Some(dest) = destination(&cli.command) else {
            return Ok(run.stdout);
        };
        let args = reproducible_args(argv, run.seed);
        write_run(&run, &dest, subcommand_name(&cli.command), args)?;
        Ok(run.stdout)
    })
}

fn env_seed() -> CliResult<Option<u64>> {
    match std::env::var("STRIPSCREEN_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("STRIPSCREEN_SEED is not a u64: '{s}'"))),
        Err(_) => Ok(None),
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Summarize { .. } => "summarize",
        Command::Analyze { .. } => "analyze",
        Command::Train { .. } => "train",
        Command::Eval { .. } => "eval",
        Command::Ensemble { .. } => "ensemble",
        Command::Triage { .. } => "triage",
        Command::Sweep { .. } => "sweep",
        Command::Roc { .. } => "roc",
        Command::Synth { .. } => "synth",
        Command::Replay { .. } => "replay",
    }
}

/// Output directory and manifest file name, if the run writes anything.
fn destination(c: &Command) -> Option<(PathBuf, String)> {
    match c {
        Command::Validate { out, .. } | Command::Summarize { out, .. } => out.clone().map(|d| (d, MANIFEST_NAME.to_string())),
        Command::Analyze { out, .. }
        | Command::Train { out, .. }
        | Command::Eval { out, .. }
        | Command::Ensemble { out, .. }
        | Command::Triage { out, .. }
        | Command::Sweep { out, .. }
        | Command::Roc { out, .. } => Some((out.clone(), MANIFEST_NAME.to_string())),
        Command::Synth { out, .. } => {
            let dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
            let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Some((dir, format!("{name}.manifest.json")))
        }
        Command::Replay { .. } => None,
    }
}

/// Drops `--out` and `--workers` and pins the resolved seed.
fn reproducible_args(argv: &[OsString], seed: Option<u64>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        match a.as_str() {
            "--out" | "--workers" | "--seed" => {
                it.next();
            }
            s if s.starts_with("--out=") || s.starts_with("--workers=") || s.starts_with("--seed=") => {}
            _ => out.push(a),
        }
    }
    if let Some(s) = seed {
        out.push("--seed".into());
        out.push(s.to_string());
    }
    out
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::runtime(format!("cannot write {}: {e}", path.display()))
}

fn hash_inputs(paths: &[PathBuf]) -> CliResult<Vec<FileHash>> {
    paths
        .iter()
        .map(|p| {
            let bytes = std::fs::read(p).map_err(|e| Failure::usage(format!("cannot read input {}: {e}", p.display())))?;
            Ok(FileHash {
                path: p.to_string_lossy().into_owned(),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}

fn write_run(run: &Run, (dir, manifest_name): &(PathBuf, String), subcommand: &str, args: Vec<String>) -> CliResult<()> {
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    let mut outputs = Vec::new();
    for (name, bytes) in &run.outputs {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_failure(&path, e))?;
        outputs.push(FileHash {
            path: name.clone(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: subcommand.to_string(),
        args,
        seed: run.seed,
        config: run.config.clone(),
        inputs: hash_inputs(&run.inputs)?,
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::runtime(e.to_string()))?;
    text.push('\n');
    let path = dir.join(manifest_name);
    std::fs::write(&path, text).map_err(|e| io_failure(&path, e))
}

fn replay(manifest_path: &Path, out: Option<&Path>) -> CliResult<String> {
    let manifest = RunManifest::load(manifest_path)?;
    if manifest.tool != env!("CARGO_PKG_NAME") {
        return Err(Failure::usage(format!("manifest was written by '{}'", manifest.tool)));
    }
    for (recorded, now) in manifest.inputs.iter().zip(hash_inputs(&manifest.inputs.iter().map(|f| PathBuf::from(&f.path)).collect::<Vec<_>>())?) {
        if recorded.sha256 != now.sha256 {
            return Err(Failure {
                code: EXIT_DATA,
                message: format!("input {} changed since the run", recorded.path),
            });
        }
    }
    let mut argv = vec![OsString::from(env!("CARGO_PKG_NAME"))];
    argv.extend(manifest.args.iter().map(OsString::from));
    // handlers only use --out to name synth's file
    argv.push("--out".into());
    argv.push(manifest.outputs.first().map_or_else(|| "replay".into(), |f| f.path.clone().into()));
    let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::usage(format!("manifest args do not parse: {}", e.kind())))?;
    if subcommand_name(&cli.command) != manifest.subcommand {
        return Err(Failure::usage("manifest args name a different subcommand"));
    }
    let run = run_command(&cli.command, cli.seed)?;

    let mut report = String::new();
    let mut mismatched = 0;
    let recorded: Vec<(&str, &str)> = manifest.outputs.iter().map(|f| (f.path.as_str(), f.sha256.as_str())).collect();
    let produced: Vec<(String, String)> = run.outputs.iter().map(|(n, b)| (n.clone(), sha256_hex(b))).collect();
    for (name, hash) in &recorded {
        match produced.iter().find(|(n, _)| n == name) {
            Some((_, h)) if h == hash => {
                let _ = writeln!(report, "identical {name}");
            }
            Some(_) => {
                mismatched += 1;
                let _ = writeln!(report, "differs   {name}");
            }
            None => {
                mismatched += 1;
                let _ = writeln!(report, "missing   {name}");
            }
        }
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        for (name, bytes) in &run.outputs {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| io_failure(&path, e))?;
        }
    }
    if mismatched > 0 || produced.len() != recorded.len() {
        return Err(Failure::runtime(format!("replay reproduced {} of {} outputs", recorded.len() - mismatched, recorded.len())));
    }
    let _ = writeln!(report, "replay: {} outputs reproduced", recorded.len());
    Ok(report)
}

fn load_input(input: &InputArgs) -> CliResult<(Dataset, crate::data::RejectionReport)> {
    if !input.input.is_file() {
        return Err(Failure::usage(format!("input {} does not exist", input.input.display())));
    }
    let ing = ingest_csv(&input.input, input.strict)?;
    Ok((ing.dataset, ing.rejections))
}

fn load_model_config(path: Option<&Path>, family: Option<Family>) -> CliResult<Option<ModelConfig>> {
    let Some(path) = path else { return Ok(None) };
    if !path.is_file() {
        return Err(Failure::usage(format!("config {} does not exist", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ModelConfig::from_toml_str(&text)?;
    if let Some(f) = family {
        if cfg.family() != f {
            return Err(Failure::usage(format!("config describes {} but --family is {f}", cfg.family())));
        }
    }
    Ok(Some(cfg))
}

enum SavedModel {
    Single(TrainedModel),
    Ensemble(EnsembleModel),
}

impl SavedModel {
    fn load(path: &Path) -> CliResult<SavedModel> {
        if !path.is_file() {
            return Err(Failure::usage(format!("model {} does not exist", path.display())));
        }
        let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
        #[derive(Deserialize)]
        struct Probe {
            format: String,
        }
        let probe: Probe = serde_json::from_slice(first).map_err(|e| Error::Format(format!("{}: unreadable header: {e}", path.display())))?;
        match probe.format.as_str() {
            MODEL_FORMAT => Ok(SavedModel::Single(TrainedModel::from_bytes(&bytes)?)),
            ENSEMBLE_FORMAT => Ok(SavedModel::Ensemble(EnsembleModel::from_bytes(&bytes)?)),
            other => Err(Error::Format(format!("{}: unknown format '{other}'", path.display())).into()),
        }
    }

    fn ensemble(self, path: &Path) -> CliResult<EnsembleModel> {
        match self {
            SavedModel::Ensemble(e) => Ok(e),
            SavedModel::Single(_) => Err(Failure::usage(format!("{} is a single model, an ensemble is required", path.display()))),
        }
    }
}

fn to_csv_bytes(s: String) -> Vec<u8> {
    s.into_bytes()
}

fn metrics_header() -> &'static str {
    "model,space,n,tp,fp,tn,fn,precision,recall,specificity,accuracy\n"
}

fn metrics_line(model: &str, space: &str, cm: &ConfusionMatrix) -> CliResult<String> {
    let m = metric_set(cm)?;
    let [p, r, s, a] = m.in_report_order();
    Ok(format!("{model},{space},{},{},{},{},{},{p},{r},{s},{a}\n", cm.total(), cm.tp, cm.fp, cm.tn, cm.fn_))
}

fn pvalue_outputs(run: &mut Run, table: &PValueTable) -> CliResult<()> {
    let xs: Vec<String> = table.column_names.to_vec();
    let ys: Vec<String> = crate::data::PadId::ALL.iter().map(|p| p.token().to_string()).collect();
    let values: Vec<Vec<f64>> = table.cells.iter().map(|row| row.iter().map(|c| c.p_value).collect()).collect();
    run.file("pvalues.csv", table.to_csv());
    run.file("pvalues.txt", table.to_text());
    run.file("pvalues_plot.csv", table.to_plot_data());
    let title = format!("Group-difference p-values ({})", table.space);
    run.file("pvalues.svg", heatmap_svg(&title, &xs, &ys, &values, ColorScale::Sequential { lo: 0.0, hi: 1.0 })?);
    Ok(())
}

fn correlation_outputs(run: &mut Run, stem: &str, title: &str, m: &CorrelationMatrix) -> CliResult<()> {
    run.file(&format!("{stem}.csv"), m.to_csv());
    run.file(&format!("{stem}_plot.csv"), m.to_plot_data());
    run.file(&format!("{stem}.svg"), heatmap_svg(title, &m.names, &m.names, &m.values, ColorScale::Diverging)?);
    Ok(())
}

fn run_command(cmd: &Command, seed: Option<u64>) -> CliResult<Run> {
    let seed0 = seed.unwrap_or(0);
    match cmd {
        Command::Validate { input, .. } => {
            let (ds, rej) = load_input(input)?;
            #[derive(Serialize)]
            struct Cfg {
                strict: bool,
            }
            let mut run = Run::new(Cfg { strict: input.strict }, None, vec![input.input.clone()])?;
            let pos = ds.positive_count();
            let _ = writeln!(
                run.stdout,
                "valid: {} samples ({} positive, {} negative), {} rows rejected",
                ds.len(),
                pos,
                ds.len() - pos,
                rej.len()
            );
            for r in &rej.rejected {
                let _ = writeln!(run.stdout, "rejected line {} ({}): {}", r.line, r.id.as_deref().unwrap_or("?"), r.reason);
            }
            run.file("rejections.csv", rej.to_csv());
            Ok(run)
        }
        Command::Summarize { input, .. } => {
            let (ds, rej) = load_input(input)?;
            #[derive(Serialize)]
            struct Cfg {
                strict: bool,
                pvalue_space: ColorSpaceId,
                variant: TTestVariant,
            }
            let cfg = Cfg {
                strict: input.strict,
                pvalue_space: ColorSpaceId::Rgb,
                variant: TTestVariant::Welch,
            };
            let mut run = Run::new(&cfg, None, vec![input.input.clone()])?;
            let report = summarize(&ds)?;
            let table = group_difference_table(&ds, cfg.pvalue_space, cfg.variant)?;
            run.stdout = report.to_text();
            let _ = writeln!(run.stdout, "\nP-values of the healthy vs sick comparison");
            run.stdout.push_str(&table.to_text());
            if !rej.is_empty() {
                let _ = writeln!(run.stdout, "\n{} rows rejected", rej.len());
            }
            run.file("summary.txt", run.stdout.clone());
            run.file("statistics.csv", report.statistics_csv());
            run.file("gender.csv", report.gender_csv());
            run.file("clinical.csv", report.clinical_csv());
            run.file("pvalues.csv", table.to_csv());
            run.file("pvalues.txt", table.to_text());
            Ok(run)
        }
        Command::Analyze { input, space, variant, .. } => {
            let (ds, _) = load_input(input)?;
            #[derive(Serialize)]
            struct Cfg {
                strict: bool,
                space: ColorSpaceId,
                variant: TTestVariant,
            }
            let mut run = Run::new(
                Cfg {
                    strict: input.strict,
                    space: *space,
                    variant: *variant,
                },
                None,
                vec![input.input.clone()],
            )?;
            let table = group_difference_table(&ds, *space, *variant)?;
            pvalue_outputs(&mut run, &table)?;
            let urine = correlation_matrix(&ds, &Variable::urine_block(*space))?;
            correlation_outputs(&mut run, "correlation_urine", &format!("Urine channels and PCR ({space})"), &urine)?;
            let clinical = correlation_matrix(&ds, &Variable::clinical_block())?;
            correlation_outputs(&mut run, "correlation_clinical", "Clinical variables and PCR", &clinical)?;
            run.stdout = table.to_text();
            Ok(run)
        }
        Command::Train {
            input,
            space,
            family,
            config,
            tuning,
            folds,
            ..
        } => {
            let (ds, _) = load_input(input)?;
            let base = load_model_config(config.as_deref(), Some(*family))?.unwrap_or_else(|| ModelConfig::new(*family, seed0));
            let cfg = match tuning {
                Tuning::Fixed => base.with_seed(seed0),
                Tuning::GridOnce => {
                    let mut grid = HyperGrid::default_for(*family, seed0);
                    grid.base = base.with_seed(seed0);
                    grid_search(&grid, &ds, *space, *folds, seed0)?.best
                }
                Tuning::GridPerRep => return Err(Failure::usage("train supports --tuning fixed or grid-once")),
            };
            let x = ds.samples().iter().map(|s| featurize(s, *space)).collect::<crate::Result<Vec<_>>>()?;
            let model = train(&x, &ds.labels(), &cfg)?;
            let mut run = Run::new(&cfg, Some(seed0), vec![input.input.clone()])?;
            let pred = threshold_scores(&model.predict_scores(&x)?, DEFAULT_THRESHOLD);
            let cm = confusion(&pred, &ds.labels())?;
            let name = format!("{}_{}.model", family.name(), space.name());
            run.file(&name, model.to_bytes()?);
            let mut m = metrics_header().to_string();
            m.push_str(&metrics_line(family.name(), space.name(), &cm)?);
            run.file("train_metrics.csv", m);
            let _ = writeln!(run.stdout, "trained {} on {} ({} samples) -> {name}", family.name(), space, ds.len());
            Ok(run)
        }
        Command::Eval {
            input,
            model: Some(model_path),
            ..
        } => {
            let (ds, _) = load_input(input)?;
            let labels = ds.labels();
            let mut out = metrics_header().to_string();
            let cfg = match SavedModel::load(model_path)? {
                SavedModel::Single(m) => {
                    let x = ds.samples().iter().map(|s| featurize(s, m.space())).collect::<crate::Result<Vec<_>>>()?;
                    let cm = confusion(&threshold_scores(&m.predict_scores(&x)?, DEFAULT_THRESHOLD), &labels)?;
                    out.push_str(&metrics_line(m.family().name(), m.space().name(), &cm)?);
                    serde_json::to_value(m.config()).map_err(|e| Failure::runtime(e.to_string()))?
                }
                SavedModel::Ensemble(e) => {
                    let votes = e.votes(&ds)?;
                    let pred = votes.iter().map(|&v| majority_predict(v)).collect::<crate::Result<Vec<Label>>>()?;
                    out.push_str(&metrics_line(&format!("ensemble_{}", e.family().name()), "all", &confusion(&pred, &labels)?)?);
                    serde_json::json!({ "ensemble": e.family().name() })
                }
            };
            let mut run = Run::new(cfg, None, vec![input.input.clone(), model_path.clone()])?;
            run.stdout = out.clone();
            run.file("metrics.csv", out);
            Ok(run)
        }
        Command::Eval {
            input,
            model: None,
            space,
            family,
            reps,
            test_fraction,
            tuning,
            folds,
            config,
            ensemble,
            rule,
            ..
        } => {
            let (ds, _) = load_input(input)?;
            let mut plan = ExperimentPlan {
                reps: *reps,
                test_fraction: *test_fraction,
                master_seed: seed0,
                tuning: *tuning,
                folds: *folds,
                ensemble: *ensemble,
                abstention_rule: *rule,
                ..ExperimentPlan::default()
            };
            if !space.is_empty() {
                plan.spaces = space.clone();
            }
            if !family.is_empty() {
                plan.families = family.clone();
            }
            if let Some(cfg) = load_model_config(config.as_deref(), None)? {
                plan.configs.insert(cfg.family(), cfg);
            }
            let report = run_repeated(&ds, &plan)?;
            let mut run = Run::new(&report.plan, Some(seed0), vec![input.input.clone()])?;
            run.stdout = report.to_text();
            run.file("report.csv", report.to_csv());
            run.file("report.txt", report.to_text());
            run.file("reps.jsonl", report.to_jsonl()?);
            let tuned: Vec<serde_json::Value> = report
                .configs
                .iter()
                .map(|(s, f, c)| serde_json::json!({ "space": s, "family": f, "config": c }))
                .collect();
            let mut tuned_text = serde_json::to_string_pretty(&tuned).map_err(|e| Failure::runtime(e.to_string()))?;
            tuned_text.push('\n');
            run.file("configs.json", tuned_text);
            if let Some(sweep) = report.sweep_csv() {
                run.stdout.push('\n');
                run.stdout.push_str(&sweep);
                run.file("sweep.csv", sweep);
            }
            Ok(run)
        }
        Command::Ensemble { input, family, config, .. } => {
            let (ds, _) = load_input(input)?;
            let cfg = load_model_config(config.as_deref(), Some(*family))?.unwrap_or_else(|| ModelConfig::new(*family, seed0));
            let e = train_ensemble(&ds, &cfg, seed0)?;
            let mut run = Run::new(&cfg, Some(seed0), vec![input.input.clone()])?;
            let votes = e.votes(&ds)?;
            let pred = votes.iter().map(|&v| majority_predict(v)).collect::<crate::Result<Vec<Label>>>()?;
            let mut m = metrics_header().to_string();
            m.push_str(&metrics_line(&format!("ensemble_{}", family.name()), "all", &confusion(&pred, &ds.labels())?)?);
            run.file("ensemble.model", e.to_bytes()?);
            run.file("train_metrics.csv", m);
            let _ = writeln!(
                run.stdout,
                "trained {ENSEMBLE_SIZE} {} members on {} samples -> ensemble.model",
                family.name(),
                ds.len()
            );
            Ok(run)
        }
        Command::Triage { input, model, k, rule, .. } => {
            let (ds, _) = load_input(input)?;
            let e = SavedModel::load(model)?.ensemble(model)?;
            let votes = e.votes(&ds)?;
            let ids: Vec<&str> = ds.samples().iter().map(|s| s.id.as_str()).collect();
            let csv = triage_csv(&ids, &votes, *k, *rule)?;
            let mut run = Run::new(serde_json::json!({ "k": k, "rule": rule }), None, vec![input.input.clone(), model.clone()])?;
            let answered = votes.iter().filter(|&&v| crate::ensemble::abstaining_predict_with(v, *k, *rule).map(|t| t.label().is_some()).unwrap_or(false)).count();
            let _ = writeln!(run.stdout, "k = {k}: {answered} of {} samples answered", votes.len());
            run.file("triage.csv", csv);
            Ok(run)
        }
        Command::Sweep { input, model, rule, .. } => {
            let (ds, _) = load_input(input)?;
            let e = SavedModel::load(model)?.ensemble(model)?;
            let rows = abstention_sweep(&e, &ds, *rule)?;
            let mut run = Run::new(serde_json::json!({ "rule": rule }), None, vec![input.input.clone(), model.clone()])?;
            run.stdout = sweep_to_text(&rows);
            run.file("sweep.csv", sweep_to_csv(&rows));
            run.file("sweep.txt", sweep_to_text(&rows));
            Ok(run)
        }
        Command::Roc { input, model, .. } => {
            let (ds, _) = load_input(input)?;
            let labels = ds.labels();
            let (scores, source, title) = match SavedModel::load(model)? {
                SavedModel::Single(m) => {
                    let x = ds.samples().iter().map(|s| featurize(s, m.space())).collect::<crate::Result<Vec<_>>>()?;
                    let title = format!("ROC, {} on {}", m.family().display_name(), m.space());
                    (m.predict_scores(&x)?, "model_probability", title)
                }
                SavedModel::Ensemble(e) => {
                    let scores = e.votes(&ds)?.iter().map(|&v| crate::ensemble::ensemble_score(v)).collect::<crate::Result<Vec<f64>>>()?;
                    (scores, "ensemble_vote_fraction", format!("ROC, {} ensemble vote fraction", e.family().display_name()))
                }
            };
            let curve = roc_curve(&scores, &labels)?;
            let mut run = Run::new(serde_json::json!({ "score_source": source }), None, vec![input.input.clone(), model.clone()])?;
            let pos = labels.iter().filter(|l| l.is_positive()).count();
            let summary = format!("score_source,auc,positives,negatives\n{source},{},{pos},{}\n", curve.auc, labels.len() - pos);
            run.stdout = summary.clone();
            run.file("roc.csv", curve.to_csv());
            run.file("roc.svg", curve.to_svg(&title));
            run.file("roc_summary.csv", summary);
            Ok(run)
        }
        Command::Synth { config, preset, n, out } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => {
                    if !path.is_file() {
                        return Err(Failure::usage(format!("config {} does not exist", path.display())));
                    }
                    SynthConfig::load(path)?
                }
                (None, Some(name)) => SynthConfig::preset(name)?,
                (None, None) => return Err(Failure::usage("synth needs --config or --preset")),
            };
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            if let Some(n) = n {
                cfg = cfg.with_n(*n);
            }
            cfg.validate()?;
            let generated = generate_with_report(&cfg)?;
            let inputs = config.iter().cloned().collect();
            let mut run = Run::new(&cfg, Some(cfg.seed), inputs)?;
            let name = out
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| Failure::usage("--out must name a file"))?;
            let ds = &generated.dataset;
            let _ = writeln!(
                run.stdout,
                "wrote {} samples ({} positive), {:.4}% of channels clamped",
                ds.len(),
                ds.positive_count(),
                100.0 * generated.clamp_rate()
            );
            run.file(&name, to_csv_bytes(crate::data::emit_csv(ds)));
            Ok(run)
        }
        Command::Replay { .. } => Err(Failure::usage("replay cannot be nested")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn reproducible_args_strip_out_and_workers() {
        let a = reproducible_args(&os(&["x", "sweep", "--out", "d", "--workers=8", "--input", "t.csv", "--seed", "4"]), Some(4));
        assert_eq!(a, ["sweep", "--input", "t.csv", "--seed", "4"]);
    }

    #[test]
    fn error_kinds() {
        assert_eq!(Failure::from(Error::Data("x".into())).code, EXIT_DATA);
        assert_eq!(Failure::from(Error::InvalidInput("x".into())).code, EXIT_USAGE);
        assert_eq!(Failure::from(Error::Degenerate("x".into())).code, EXIT_RUNTIME);
    }

    #[test]
    fn parse_failures_are_usage_errors() {
        assert_eq!(dispatch(["stripscreen", "frobnicate"]), EXIT_USAGE);
        assert_eq!(dispatch(["stripscreen", "validate", "--input", "a.csv", "--bogus"]), EXIT_USAGE);
        assert_eq!(dispatch(["stripscreen", "triage", "--input", "a", "--out", "o", "--model", "m", "--k", "5"]), EXIT_USAGE);
        assert_eq!(dispatch(["stripscreen", "validate", "--input", "/nonexistent/file.csv"]), EXIT_USAGE);
    }

    #[test]
    fn sha256_of_empty() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
