use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rumormatch::cli::{self, Analysis, EvalTask, RunConfig};

#[derive(Parser)]
#[command(
    name = "rumormatch",
    version,
    about = "Match tweets against known rumor articles"
)]
struct Cli {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// TFIDF, BM25, EMBEDDING, DOCVEC or LEXICON.
    #[arg(long, global = true)]
    matcher: Option<String>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Worker threads for matching.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Override any config key, e.g. `--set tweets_path=t.jsonl`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Task {
    Classify,
    Identify,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Build the article index.
    Index,
    /// Score every tweet and write matches.jsonl.
    Match,
    /// Evaluate against labeled tweets.
    Eval {
        #[arg(long, value_enum, default_value = "both")]
        task: Task,
        /// Evaluate every matcher whose inputs are configured.
        #[arg(long)]
        all_matchers: bool,
    },
    /// Aggregate analyses over matches.jsonl.
    Analyze {
        /// Comma-separated subset of ratio,users,keywords,attribution,timeline.
        #[arg(long, value_delimiter = ',')]
        which: Vec<Analysis>,
    },
    /// index, match, eval and analyze in sequence.
    All,
}

fn configure(args: &Cli) -> rumormatch::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &args.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            rumormatch::Error::Config(format!("--set expects KEY=VALUE, got {kv:?}"))
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(m) = &args.matcher {
        cfg.set("matcher", m)?;
    }
    if let Some(t) = args.threshold {
        cfg.set("threshold", &t.to_string())?;
    }
    if let Some(j) = args.jobs {
        cfg.set("jobs", &j.to_string())?;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    if args.quiet {
        cfg.quiet = true;
    }
    cfg.election()?;
    Ok(cfg)
}

fn run(args: &Cli) -> rumormatch::Result<()> {
    let cfg = configure(args)?;
    match &args.command {
        Command::Index => cli::cmd_index(&cfg).map(|_| ()),
        Command::Match => cli::cmd_match(&cfg).map(|_| ()),
        Command::Eval { task, all_matchers } => {
            let tasks: &[EvalTask] = match task {
                Task::Classify => &[EvalTask::Classify],
                Task::Identify => &[EvalTask::Identify],
                Task::Both => &[EvalTask::Classify, EvalTask::Identify],
            };
            cli::cmd_eval(&cfg, tasks, *all_matchers).map(|_| ())
        }
        Command::Analyze { which } => {
            let which = if which.is_empty() {
                Analysis::ALL.to_vec()
            } else {
                which.clone()
            };
            cli::cmd_analyze(&cfg, &which).map(|_| ())
        }
        Command::All => cli::cmd_all(&cfg),
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
