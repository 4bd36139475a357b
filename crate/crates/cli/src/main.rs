use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use manifold_cli::commands::{self, AnalyzeOptions, Epsilon};
use manifold_cli::{CliError, DatasetManifest, Normalize, Result};
use manifold_core::{Metric, ReferencePolicy};

#[derive(Parser)]
#[command(
    name = "manifold",
    version,
    about = "Radius, saturation and recognition for compact signal sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw traces from a generator config into a signal matrix.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo saturation curve of a dataset.
    Analyze {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated subset sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = manifold_core::estimator::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = manifold_core::estimator::DEFAULT_TAU)]
        tau: f64,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accept or reject each query by distance to the dataset.
    Detect {
        #[command(flatten)]
        data: DataArgs,
        /// Signal matrix of queries.
        #[arg(long)]
        query: PathBuf,
        /// `auto` or a nonnegative tolerance.
        #[arg(long, default_value = "auto")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    manifest: Option<PathBuf>,
    /// Signal matrix used with default preprocessing.
    #[arg(long)]
    data: Option<PathBuf>,
    /// sup, l2 or cosine.
    #[arg(long)]
    metric: Option<String>,
    /// first or medoid.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    detrend: bool,
    /// none, max-abs or l2.
    #[arg(long)]
    normalize: Option<String>,
}

impl DataArgs {
    fn manifest(&self) -> Result<DatasetManifest> {
        let mut m = match (&self.manifest, &self.data) {
            (Some(path), _) => DatasetManifest::read(path)?,
            (None, Some(path)) => DatasetManifest::for_data(path),
            (None, None) => {
                return Err(CliError::invalid("one of --manifest or --data is required"))
            }
        };
        if let Some(metric) = &self.metric {
            m.metric = metric.parse::<Metric>()?;
        }
        if let Some(x0) = &self.x0 {
            m.x0 = x0.parse::<ReferencePolicy>()?;
        }
        if let Some(grid) = self.grid {
            m.preprocess.grid = Some(grid);
        }
        if self.detrend {
            m.preprocess.detrend = true;
        }
        if let Some(n) = &self.normalize {
            m.preprocess.normalize = n.parse::<Normalize>()?;
        }
        m.check_grid()?;
        Ok(m)
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    if out.is_none() {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            spec,
            count,
            out,
            seed,
        } => commands::cmd_generate(&spec, count, &out, seed),
        Command::Analyze {
            data,
            sizes,
            trials,
            seed,
            tau,
            window,
            out,
        } => {
            let manifest = data.manifest()?;
            let opts = AnalyzeOptions {
                sizes,
                trials,
                seed,
                tau,
                window,
                ..AnalyzeOptions::default()
            };
            let text = commands::cmd_analyze(&manifest, &opts, out.as_deref())?;
            emit(&text, &out)
        }
        Command::Detect {
            data,
            query,
            epsilon,
            out,
        } => {
            let manifest = data.manifest()?;
            let epsilon: Epsilon = epsilon.parse()?;
            let text = commands::cmd_detect(&manifest, &query, epsilon, out.as_deref())?;
            emit(&text, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("manifold: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
