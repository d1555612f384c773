//! `bidbench`: synthesize, enumerate, score and preview decomposition datasets.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bidbench_core::eval::eval_run;
use bidbench_core::imgcore::save_image;
use bidbench_core::manifest::read_manifests;
use bidbench_core::preview::contact_sheet;
use bidbench_core::scenario::enumerate_cases;
use bidbench_core::synth::run_synth;
use bidbench_core::{Error, Mode, RunConfig, Task};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_ASSET: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "bidbench", version, about = "Blind image decomposition benchmark harness")]
struct Cli {
    /// Worker threads; capped by BIDBENCH_THREADS. Never changes output bytes.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate mixed images, ground truths and manifest.jsonl.
    Synth(SynthArgs),
    /// Print every case of N components, sorted by size then bits.
    Enumerate(EnumerateArgs),
    /// Score method outputs against a dataset and write a JSON report.
    Eval(EvalArgs),
    /// Render a contact sheet of the first k samples.
    Preview(PreviewArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Train,
    Test,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Override the output side length in pixels.
    #[arg(long)]
    size: Option<usize>,
    /// Override the parameter mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Override the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Task1,
    Task2a,
    Task2b,
    Task3,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Number of components.
    #[arg(short, long, required_unless_present = "task")]
    n: Option<usize>,
    /// Use a task's component names (and its component count).
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset manifest.jsonl.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of `<sample_id>.<component>.png` files and optional predictions.jsonl.
    #[arg(long)]
    outputs: PathBuf,
    /// Report path; printed as a table only when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dataset root; defaults to the manifest's directory.
    #[arg(long)]
    dataset_root: Option<PathBuf>,
}

#[derive(Args)]
struct PreviewArgs {
    /// Dataset manifest.jsonl.
    #[arg(long)]
    manifest: PathBuf,
    /// Number of rows, taken in sample_id order.
    #[arg(short, long, default_value_t = 4)]
    k: usize,
    /// PNG path for the sheet.
    #[arg(long)]
    out: PathBuf,
    /// Dataset root; defaults to the manifest's directory.
    #[arg(long)]
    dataset_root: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::MissingAsset(_)
        | Error::MissingOutput { .. }
        | Error::Decode { .. }
        | Error::UnsupportedFormat { .. }
        | Error::DimensionMismatch { .. } => EXIT_ASSET,
        _ => EXIT_USAGE,
    }
}

fn worker_count(requested: Option<usize>) -> Result<usize, Failure> {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut workers = requested.unwrap_or(available).max(1);
    if let Ok(cap) = std::env::var("BIDBENCH_THREADS") {
        let cap: usize = cap
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("BIDBENCH_THREADS must be a positive integer, got {cap:?}")))?;
        workers = workers.min(cap.max(1));
    }
    Ok(workers)
}

fn manifest_root(manifest: &Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| manifest.parent().map(Path::to_path_buf).unwrap_or_default())
}

fn synth(args: SynthArgs, workers: usize) -> Result<(), Failure> {
    let mut cfg = RunConfig::from_json_file(&args.config)?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(s) = args.size {
        cfg.size = s;
    }
    if let Some(m) = args.mode {
        cfg.mode = match m {
            ModeArg::Train => Mode::Train,
            ModeArg::Test => Mode::Test,
        };
    }
    if let Some(o) = args.output {
        cfg.output = o;
    }
    let summary = run_synth(&cfg, workers)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    Ok(())
}

fn enumerate(args: EnumerateArgs) -> Result<(), Failure> {
    let names: Vec<String> = match args.task {
        Some(t) => {
            let task = match t {
                TaskArg::Task1 => Task::Task1,
                TaskArg::Task2a => Task::Task2a,
                TaskArg::Task2b => Task::Task2b,
                TaskArg::Task3 => Task::Task3,
            };
            task.registry().iter().map(|(n, _)| n.to_string()).collect()
        }
        None => Vec::new(),
    };
    let n = match (args.n, names.len()) {
        (Some(n), 0) => n,
        (Some(n), k) if n != k => return Err(Failure::Usage(format!("-n {n} conflicts with {k} task components"))),
        (_, 0) => return Err(Failure::Usage("the linear-mix task needs -n".into())),
        (_, k) => k,
    };
    let cases = enumerate_cases(n)?;
    println!("rank\tcase\tbits\tsize\tcomponents");
    for (i, c) in cases.iter().enumerate() {
        let members: Vec<String> = c
            .indices()
            .into_iter()
            .map(|m| names.get(m - 1).cloned().unwrap_or_else(|| m.to_string()))
            .collect();
        println!(
            "{}\t{}\t{}\t{}\t{}",
            i + 1,
            c.label(),
            c.bits(),
            c.len(),
            members.join("+")
        );
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let manifests = read_manifests(&args.manifest)?;
    let root = manifest_root(&args.manifest, args.dataset_root);
    let report = eval_run(&manifests, &root, &args.outputs)?;
    print!("{}", report.to_table());
    if let Some(path) = args.report {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.to_path_buf(),
                source: e,
            })?;
        }
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        fs::write(&path, json).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}

fn preview(args: PreviewArgs) -> Result<(), Failure> {
    let manifests = read_manifests(&args.manifest)?;
    let root = manifest_root(&args.manifest, args.dataset_root);
    let sheet = contact_sheet(&manifests, &root, args.k)?;
    save_image(&sheet, &args.out)?;
    println!(
        "{}x{} sheet written to {}",
        sheet.width(),
        sheet.height(),
        args.out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let workers = worker_count(cli.workers)?;
    match cli.command {
        Command::Synth(a) => synth(a, workers),
        Command::Enumerate(a) => enumerate(a),
        Command::Eval(a) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            eval(a)
        }
        Command::Preview(a) => preview(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
