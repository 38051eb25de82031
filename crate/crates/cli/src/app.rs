//! Command-line surface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analyze::{cmd_analyze, AnalyzeRecipe};
use crate::config::{ScenarioConfig, SchemeChoice};
use crate::experiments::{cmd_optimize, cmd_sweep, summarize, RunScale, SweepRecipe};
use crate::output::render;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ramix",
    version,
    about = "Rotatable-antenna mixed near/far-field experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario configuration (TOML); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Scale {
    /// Full-scale swarm (S = T = 100) instead of the desk-scale default.
    #[arg(long)]
    pub full: bool,
    /// Swarm size override.
    #[arg(long)]
    pub swarm: Option<usize>,
    /// Swarm iteration override.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Enforce the obtuse-pair penalty regardless of the rotation range.
    #[arg(long)]
    pub strict_obtuse: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Uniform-rotation interference and two-user rate curves.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// fig2 … fig6.
        #[arg(long)]
        recipe: String,
    },
    /// Runs one scheme on one sampled scenario.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scale: Scale,
        /// Scheme label; the configured one when omitted.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Multi-seed sweep of every scheme over one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scale: Scale,
        /// fig7 … fig10.
        #[arg(long)]
        recipe: String,
        /// Seeds per point, starting at the configured seed.
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Parses and checks a configuration file.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            ScenarioConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn emit(out: Option<&Path>, doc: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, doc).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    job: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match threads {
        None => job(),
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(job),
    }
}

fn apply_scale(cfg: &mut ScenarioConfig, scale: &Scale, default: Option<RunScale>) {
    let base = if scale.full { Some(RunScale::FULL) } else { default };
    if let Some(b) = base {
        b.apply(cfg);
    }
    if let Some(s) = scale.swarm {
        cfg.optimizer.swarm_size = s;
    }
    if let Some(t) = scale.iterations {
        cfg.optimizer.iterations = t;
    }
    if scale.strict_obtuse {
        cfg.optimizer.penalty = "on".into();
    }
}

/// Executes a parsed command line and returns the text summary.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::ValidateConfig { config } => {
            let cfg = load_config(Some(config))?;
            cfg.build(cfg.seed, None)?;
            Ok(format!("{}: ok\n", config.display()))
        }
        Command::Analyze { common, recipe } => {
            let name = recipe.as_str();
            let recipe = AnalyzeRecipe::parse(name)
                .ok_or_else(|| CliError::Config(format!("unknown analyze recipe '{name}' (fig2 … fig6)")))?;
            let mut cfg = load_config(common.config.as_deref())?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            let table = with_threads(common.threads, || cmd_analyze(&cfg, recipe))?;
            let doc = render(&format!("analyze --recipe {name}"), cfg.seed, &cfg, &table)?;
            emit(common.out.as_deref(), &doc)?;
            Ok(format!("analyze {name}: {} rows\n", table.rows.len()))
        }
        Command::Optimize { common, scale, scheme } => {
            let mut cfg = load_config(common.config.as_deref())?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            if let Some(label) = scheme {
                cfg.optimizer.scheme = label.clone();
            }
            apply_scale(&mut cfg, scale, None);
            cfg.validate()?;
            let choice = SchemeChoice::parse(&cfg.optimizer.scheme)?;
            let (report, table) = with_threads(common.threads, || cmd_optimize(&cfg, choice, cfg.seed))?;
            let doc = render("optimize", cfg.seed, &cfg, &table)?;
            emit(common.out.as_deref(), &doc)?;
            Ok(summarize(choice, &report))
        }
        Command::Sweep {
            common,
            scale,
            recipe,
            seeds,
        } => {
            let name = recipe.as_str();
            let recipe = SweepRecipe::parse(name)
                .ok_or_else(|| CliError::Config(format!("unknown sweep recipe '{name}' (fig7 … fig10)")))?;
            let mut cfg = load_config(common.config.as_deref())?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            apply_scale(&mut cfg, scale, Some(RunScale::DESK));
            cfg.validate()?;
            let n_seeds = seeds.unwrap_or(if scale.full {
                RunScale::FULL.seeds
            } else {
                RunScale::DESK.seeds
            });
            let spec = recipe.spec();
            let table = with_threads(common.threads, || cmd_sweep(&cfg, &spec, n_seeds))?;
            let doc = render(
                &format!("sweep --recipe {name} --seeds {n_seeds}"),
                cfg.seed,
                &cfg,
                &table,
            )?;
            emit(common.out.as_deref(), &doc)?;
            Ok(format!(
                "sweep {name}: {} rows over {n_seeds} seeds\n",
                table.rows.len()
            ))
        }
    }
}
