//! `chatgraph` — conversational-network extraction and abuse classification.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::PipelineInput;
use config::{pick, FileConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "chatgraph",
    version,
    about = "Graph-based abusive-message classification from chat logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file with default values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Render SVG plots next to the CSV reports.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the Before/After/Full graphs around one target message.
    Extract(ExtractArgs),
    /// Compute every measure of a serialized graph.
    Measures(MeasuresArgs),
    /// Build the 75-column feature table for a target list.
    Featurize(FeaturizeArgs),
    /// Train a calibrated SVM on a feature table and save the model file.
    Train(TrainArgs),
    /// Evaluate with repeated stratified splits; write metrics and PR curves.
    Evaluate(EvaluateArgs),
    /// Permutation importance and feature-ablation curve.
    Ablate(AblateArgs),
    /// Generate a synthetic corpus with planted abuse dynamics.
    Synth(SynthArgs),
    /// Full run: corpus (log or synth) -> features -> evaluation -> ablation.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// JSONL chat log.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Channel of the target message.
    #[arg(long)]
    channel: String,
    /// Seq of the target message within its channel.
    #[arg(long)]
    target_seq: u64,
    /// Context half-width in messages.
    #[arg(long)]
    context: Option<usize>,
    /// Sliding-window size in messages.
    #[arg(long)]
    window: Option<usize>,
    /// Output directory for before.csv / after.csv / full.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MeasuresArgs {
    /// Graph CSV produced by `extract`.
    #[arg(long)]
    graph: PathBuf,
    /// Output CSV (one row per measure).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[arg(long)]
    log: Option<PathBuf>,
    /// Target list CSV: channel,seq,label.
    #[arg(long)]
    targets: Option<PathBuf>,
    #[arg(long)]
    context: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    /// Output features CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Features CSV from `featurize`.
    #[arg(long)]
    features: Option<PathBuf>,
    /// SVM penalty C.
    #[arg(long)]
    c: Option<f64>,
    /// RBF width: "auto" or a number.
    #[arg(long)]
    gamma: Option<String>,
    /// Output model JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    /// Number of random splits.
    #[arg(long)]
    runs: Option<usize>,
    /// Train fraction of each split.
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<String>,
    /// Output directory for metrics.csv and pr_curve.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<String>,
    /// Permutation repeats per feature.
    #[arg(long)]
    repeats: Option<usize>,
    /// Output directory for importance.csv and ablation.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    messages: Option<usize>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    abuse_rate: Option<f64>,
    /// Pile-on intensity (0 disables the planted effect).
    #[arg(long)]
    pile_on: Option<f64>,
    #[arg(long)]
    mention_rate: Option<f64>,
    /// Output directory for corpus.jsonl and targets.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// JSONL chat log (requires --targets; mutually exclusive with --synth).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Target list CSV for --log.
    #[arg(long)]
    targets: Option<PathBuf>,
    /// Generate the corpus instead of reading one.
    #[arg(long)]
    synth: bool,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    messages: Option<usize>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    abuse_rate: Option<f64>,
    #[arg(long)]
    pile_on: Option<f64>,
    #[arg(long)]
    mention_rate: Option<f64>,
    #[arg(long)]
    context: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Output directory for all reports.
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Data(chatgraph::Error),
}

impl From<chatgraph::Error> for CliError {
    fn from(e: chatgraph::Error) -> Self {
        CliError::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let defaults = RunConfig::default();
    let mut cfg = RunConfig {
        seed: pick(cli.seed, file.seed, defaults.seed),
        jobs: pick(cli.jobs, file.jobs, defaults.jobs),
        svg: pick(cli.svg.then_some(true), file.svg, defaults.svg),
        ..defaults.clone()
    };
    if cfg.jobs > 0 {
        // ignore the error if a pool already exists (tests call run() twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global();
    }

    match cli.command {
        Command::Extract(args) => {
            cfg.context = pick(args.context, file.context, defaults.context);
            cfg.window = pick(args.window, file.window, defaults.window);
            let log = require_path(args.log, &file.log, "log")?;
            cfg.log = Some(log.display().to_string());
            commands::cmd_extract(&cfg, &log, &args.channel, args.target_seq, &args.out)?;
        }
        Command::Measures(args) => {
            commands::cmd_measures(&args.graph, &args.out)?;
        }
        Command::Featurize(args) => {
            cfg.context = pick(args.context, file.context, defaults.context);
            cfg.window = pick(args.window, file.window, defaults.window);
            let log = require_path(args.log, &file.log, "log")?;
            let targets = require_path(args.targets, &file.targets, "targets")?;
            cfg.log = Some(log.display().to_string());
            cfg.targets = Some(targets.display().to_string());
            commands::cmd_featurize(&cfg, &log, &targets, &args.out)?;
        }
        Command::Train(args) => {
            cfg.c = pick(args.c, file.c, defaults.c);
            cfg.gamma = pick(args.gamma, file.gamma.clone(), defaults.gamma.clone());
            let features = require_path(args.features, &file.features, "features")?;
            cfg.features = Some(features.display().to_string());
            commands::cmd_train(&cfg, &features, &args.out)?;
        }
        Command::Evaluate(args) => {
            cfg.runs = pick(args.runs, file.runs, defaults.runs);
            cfg.train_fraction = pick(
                args.train_fraction,
                file.train_fraction,
                defaults.train_fraction,
            );
            cfg.c = pick(args.c, file.c, defaults.c);
            cfg.gamma = pick(args.gamma, file.gamma.clone(), defaults.gamma.clone());
            let features = require_path(args.features, &file.features, "features")?;
            cfg.features = Some(features.display().to_string());
            commands::cmd_evaluate(&cfg, &features, &args.out)?;
        }
        Command::Ablate(args) => {
            cfg.runs = pick(args.runs, file.runs, defaults.runs);
            cfg.train_fraction = pick(
                args.train_fraction,
                file.train_fraction,
                defaults.train_fraction,
            );
            cfg.c = pick(args.c, file.c, defaults.c);
            cfg.gamma = pick(args.gamma, file.gamma.clone(), defaults.gamma.clone());
            cfg.repeats = pick(args.repeats, file.repeats, defaults.repeats);
            let features = require_path(args.features, &file.features, "features")?;
            cfg.features = Some(features.display().to_string());
            commands::cmd_ablate(&cfg, &features, &args.out)?;
        }
        Command::Synth(args) => {
            cfg.users = pick(args.users, file.users, defaults.users);
            cfg.messages = pick(args.messages, file.messages, defaults.messages);
            cfg.channels = pick(args.channels, file.channels, defaults.channels);
            cfg.abuse_rate = pick(args.abuse_rate, file.abuse_rate, defaults.abuse_rate);
            cfg.pile_on = pick(args.pile_on, file.pile_on, defaults.pile_on);
            cfg.mention_rate = pick(args.mention_rate, file.mention_rate, defaults.mention_rate);
            cfg.synth = true;
            commands::cmd_synth(&cfg, &args.out)?;
        }
        Command::Pipeline(args) => {
            cfg.users = pick(args.users, file.users, defaults.users);
            cfg.messages = pick(args.messages, file.messages, defaults.messages);
            cfg.channels = pick(args.channels, file.channels, defaults.channels);
            cfg.abuse_rate = pick(args.abuse_rate, file.abuse_rate, defaults.abuse_rate);
            cfg.pile_on = pick(args.pile_on, file.pile_on, defaults.pile_on);
            cfg.mention_rate = pick(args.mention_rate, file.mention_rate, defaults.mention_rate);
            cfg.context = pick(args.context, file.context, defaults.context);
            cfg.window = pick(args.window, file.window, defaults.window);
            cfg.c = pick(args.c, file.c, defaults.c);
            cfg.gamma = pick(args.gamma, file.gamma.clone(), defaults.gamma.clone());
            cfg.runs = pick(args.runs, file.runs, defaults.runs);
            cfg.train_fraction = pick(
                args.train_fraction,
                file.train_fraction,
                defaults.train_fraction,
            );
            cfg.repeats = pick(args.repeats, file.repeats, defaults.repeats);

            if args.synth && (args.log.is_some() || args.targets.is_some()) {
                return Err(CliError::Usage(
                    "--synth cannot be combined with --log/--targets".into(),
                ));
            }
            // explicit --log/--targets flags override a synth=true config
            let synth_mode = args.synth
                || (file.synth == Some(true) && args.log.is_none() && args.targets.is_none());
            let input = if synth_mode {
                cfg.synth = true;
                PipelineInput::Synth
            } else {
                let log = args
                    .log
                    .clone()
                    .or_else(|| file.log.as_ref().map(PathBuf::from));
                let targets = args
                    .targets
                    .clone()
                    .or_else(|| file.targets.as_ref().map(PathBuf::from));
                match (log, targets) {
                    (Some(log), Some(targets)) => {
                        cfg.log = Some(log.display().to_string());
                        cfg.targets = Some(targets.display().to_string());
                        PipelineInput::Log { log, targets }
                    }
                    (Some(_), None) => {
                        return Err(CliError::Usage("--log requires --targets".into()));
                    }
                    (None, Some(_)) => {
                        return Err(CliError::Usage("--targets requires --log".into()));
                    }
                    (None, None) => {
                        return Err(CliError::Usage(
                            "pass either --log with --targets, or --synth".into(),
                        ));
                    }
                }
            };
            commands::cmd_pipeline(&cfg, input, &args.out)?;
        }
    }
    Ok(())
}

fn require_path(
    flag: Option<PathBuf>,
    file: &Option<String>,
    name: &str,
) -> Result<PathBuf, CliError> {
    flag.or_else(|| file.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::Usage(format!("--{name} is required (flag or config file)")))
}
