use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freqstab::ingest::{Scenario, SynthOptions};
use freqstab::pipeline::{cmd_explain, cmd_extract, cmd_features, cmd_report, cmd_synth, cmd_train, Context, LoadedConfig, PipelineError, Scope};
use freqstab::signal::Indicator;

/// Frequency-stability indicators, boosted-tree models and their Shapley
/// explanations.
#[derive(Debug, Parser)]
#[command(name = "freqstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Pipeline configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScopeArg {
    Full,
    DayAhead,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hourly indicators from the raw frequency recordings.
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        area: Option<String>,
    },
    /// Area feature frames from the regional input files.
    Features {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        area: Option<String>,
    },
    /// Trains the full and day-ahead models of every target.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        area: Option<String>,
        /// nadir, rocof, msd or integral.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value = "both")]
        scope: ScopeArg,
        /// Overrides the model seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// SHAP artifacts of the full models.
    Explain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        area: Option<String>,
        #[arg(long)]
        target: Option<String>,
        /// Explains this model file instead of the trained one.
        #[arg(long, requires = "target")]
        model: Option<PathBuf>,
        #[arg(long)]
        background_size: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Performance gains, ramp speeds and correlation tables.
    Report {
        #[command(flatten)]
        common: Common,
    },
    /// Writes a synthetic area with known ground truth and a matching config.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "ce_like")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        days: usize,
        /// Disturbance scale; 0 gives noiseless indicators.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
}

fn context(common: &Common) -> Result<Context, PipelineError> {
    let mut loaded = LoadedConfig::load(&common.config)?;
    if let Some(dir) = &common.output_dir {
        loaded.config.output_dir = dir.clone();
    }
    Ok(Context::new(loaded))
}

fn indicator(name: Option<&str>) -> Result<Option<Indicator>, PipelineError> {
    name.map(|n| Indicator::parse(n).ok_or_else(|| PipelineError::Usage(format!("unknown target {n:?}; expected nadir, rocof, msd or integral"))))
        .transpose()
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, PipelineError> {
    match cli.command {
        Command::Extract { common, area } => cmd_extract(&context(&common)?, area.as_deref()),
        Command::Features { common, area } => cmd_features(&context(&common)?, area.as_deref()),
        Command::Train { common, area, target, scope, seed } => {
            let target = indicator(target.as_deref())?;
            let mut ctx = context(&common)?;
            if let Some(s) = seed {
                ctx.loaded.config.seeds.model = s;
            }
            let scopes = match scope {
                ScopeArg::Full => vec![Scope::Full],
                ScopeArg::DayAhead => vec![Scope::DayAhead],
                ScopeArg::Both => vec![Scope::Full, Scope::DayAhead],
            };
            cmd_train(&ctx, area.as_deref(), target, &scopes)
        }
        Command::Explain { common, area, target, model, background_size, top_k } => {
            let target = indicator(target.as_deref())?;
            let mut ctx = context(&common)?;
            if let Some(b) = background_size {
                ctx.loaded.config.explain.background_size = b;
            }
            if let Some(k) = top_k {
                ctx.loaded.config.explain.top_k = k;
            }
            cmd_explain(&ctx, area.as_deref(), target, model.as_deref())
        }
        Command::Report { common } => cmd_report(&context(&common)?),
        Command::Synth { out, scenario, seed, days, noise } => {
            let scenario = Scenario::parse(&scenario)
                .ok_or_else(|| PipelineError::Usage(format!("unknown scenario {scenario:?}; expected ce_like, gb_like or nordic_like")))?;
            if days == 0 || !(noise >= 0.0 && noise.is_finite()) {
                return Err(PipelineError::Usage("days must be positive and noise a non-negative number".into()));
            }
            let options = SynthOptions { seed, n_days: days, scenario, noise, ..SynthOptions::default() };
            cmd_synth(&out, &options).map(|(_, written)| written)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
