use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uentropy::report::{list_systems, run_experiment, ExitStatus, ExperimentConfig, ExperimentKind};
use uentropy::Mode;

/// Entropy, shadowing and expansivity experiments on finite systems.
#[derive(Parser)]
#[command(name = "uent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the uniformity axioms of the scale family.
    Validate(RunArgs),
    /// Separated and spanning counts and the uniform entropy.
    Entropy(RunArgs),
    /// Uniform-cover join counts and the covering entropy.
    Cover(RunArgs),
    /// Build the positive-entropy certificate from shadowed block words.
    Shadow(RunArgs),
    /// Expansivity scales, sensitivity and generator checks.
    Expansivity(RunArgs),
    /// Entropy points and entropy restricted to them.
    Entpoints(RunArgs),
    /// The system zoo.
    Systems {
        #[command(subcommand)]
        action: SystemsAction,
    },
}

#[derive(Subcommand)]
enum SystemsAction {
    List,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Zoo system, e.g. "full_shift 2 8".
    #[arg(long)]
    system: Option<String>,
    /// Serialized system file.
    #[arg(long, conflicts_with = "system")]
    system_file: Option<PathBuf>,
    /// Comma-separated scales, e.g. "2,1,1/2".
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Blocks per certificate word.
    #[arg(long)]
    word_length: Option<usize>,
}

impl RunArgs {
    fn into_config(self, kind: ExperimentKind) -> Result<ExperimentConfig, uentropy::Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if cfg.kind.is_some_and(|k| k != kind) {
            return Err(uentropy::Error::Config(format!(
                "config is a `{}` experiment, not `{kind}`",
                cfg.kind.unwrap()
            )));
        }
        cfg.kind = Some(kind);
        if self.system.is_some() || self.system_file.is_some() {
            cfg.system = self.system;
            cfg.system_file = self.system_file;
        }
        if self.grid.is_some() {
            cfg.grid = self.grid;
        }
        if let Some(out) = self.out {
            cfg.out = out;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(n) = self.nmax {
            cfg.n_max = n;
        }
        if let Some(n) = self.word_length {
            cfg.word_length = n;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Systems { action: SystemsAction::List } => {
            print!("{}", list_systems());
            return ExitCode::SUCCESS;
        }
        Command::Validate(a) => (ExperimentKind::Validate, a),
        Command::Entropy(a) => (ExperimentKind::Entropy, a),
        Command::Cover(a) => (ExperimentKind::Cover, a),
        Command::Shadow(a) => (ExperimentKind::Shadow, a),
        Command::Expansivity(a) => (ExperimentKind::Expansivity, a),
        Command::Entpoints(a) => (ExperimentKind::Entpoints, a),
    };
    let cfg = match args.into_config(kind) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("uent: {e}");
            return ExitCode::from(ExitStatus::Config.code() as u8);
        }
    };
    let outcome = run_experiment(&cfg);
    if outcome.status == ExitStatus::Success {
        println!("{}", outcome.message);
    } else {
        eprintln!("uent: {}: {}", outcome.status.label(), outcome.message);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    ExitCode::from(outcome.status.code() as u8)
}
