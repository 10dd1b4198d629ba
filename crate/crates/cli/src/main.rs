//! `confdist`: confidence distributions for the norm of a Gaussian mean.

mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use confdist::mc::{ExperimentGrid, Method};
use confdist::{BeliefBase, IntervalSpec};

use commands::{Experiment, Figure, Observed, PosteriorKind, SimSettings};
use table::Table;

#[derive(Parser, Debug)]
#[command(name = "confdist", version, about = "Confidence distributions, posteriors and beliefs for θ = ‖μ‖")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Run replicate loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file; stdout when absent and no output directory is set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Directory for output files; relative `--output` paths are resolved
    /// against it, and without `--output` the file is named after the command.
    #[arg(long, global = true, env = "CONFDIST_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug)]
struct ObservationArgs {
    /// Observed norm ‖y‖.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "y")]
    d: Option<f64>,

    /// Observed vector, comma separated; its length sets k.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "d")]
    y: Option<Vec<f64>>,

    /// Dimension of the mean vector (default 2, or the length of --y).
    #[arg(long)]
    k: Option<u32>,

    /// Known noise scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
}

impl ObservationArgs {
    fn resolve(&self) -> Result<Observed> {
        Observed::new(self.d, self.y.as_deref(), self.k, self.sigma)
    }
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Confidence level of the interval.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,

    /// Upper-tail allocation, in [0, 1 − alpha].
    #[arg(long, default_value_t = 0.05)]
    beta: f64,

    /// Use the closed procedure [θ_L, θ_U].
    #[arg(long)]
    closed: bool,
}

impl SpecArgs {
    fn resolve(&self) -> Result<IntervalSpec> {
        Ok(IntervalSpec::new(self.alpha, self.beta, self.closed)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Cd,
    Up,
    Rp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cd => Method::Cd,
            MethodArg::Up => Method::Up,
            MethodArg::Rp => Method::Rp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    Cd,
    Up,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the confidence distribution C(θ;d).
    Cd {
        #[command(flatten)]
        obs: ObservationArgs,
        /// Points θ, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        theta: Vec<f64>,
    },
    /// Observed confidence interval and its confidence.
    Ci {
        #[command(flatten)]
        obs: ObservationArgs,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Evaluate a posterior CDF and density.
    Posterior {
        #[command(flatten)]
        obs: ObservationArgs,
        #[arg(long, value_enum, default_value_t = PosteriorKind::Uniform)]
        method: PosteriorKind,
        /// Points θ, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        theta: Vec<f64>,
    },
    /// Consonant belief of [0, R] and (R, ∞), with a belief test.
    Belief {
        #[command(flatten)]
        obs: ObservationArgs,
        #[arg(long = "R", value_name = "R")]
        r: f64,
        #[arg(long, value_enum, default_value_t = BaseArg::Cd)]
        base: BaseArg,
        /// Level of the belief test of [0, R].
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Confidence, posterior probabilities and beliefs of H₀ = [0, R].
    Assess {
        #[command(flatten)]
        obs: ObservationArgs,
        #[arg(long = "R", value_name = "R")]
        r: f64,
    },
    /// Run a Monte Carlo experiment over a grid.
    Sim {
        #[arg(value_enum)]
        experiment: Experiment,
        /// True values θ₀.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8")]
        theta0: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<u32>,
        /// Replicates per grid cell.
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "cd,up,rp")]
        method: Vec<MethodArg>,
        #[command(flatten)]
        spec: SpecArgs,
        /// Evaluation points of the average CDFs.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8")]
        at: Vec<f64>,
        /// Radius of the collision hypothesis.
        #[arg(long = "R", value_name = "R", default_value_t = 2.0)]
        r: f64,
    },
    /// Long-format data behind a figure.
    Figures {
        #[arg(value_enum)]
        name: Figure,
        /// Replicates per grid cell (default depends on the figure).
        #[arg(long)]
        reps: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cd { .. } => "cd",
            Command::Ci { .. } => "ci",
            Command::Posterior { .. } => "posterior",
            Command::Belief { .. } => "belief",
            Command::Assess { .. } => "assess",
            Command::Sim { .. } => "sim",
            Command::Figures { .. } => "figures",
        }
    }
}

fn build(cli: &Cli) -> Result<Table> {
    let lab = commands::lab(cli.sequential);
    match &cli.command {
        Command::Cd { obs, theta } => commands::cd(&obs.resolve()?, theta),
        Command::Ci { obs, spec } => commands::ci(&obs.resolve()?, &spec.resolve()?),
        Command::Posterior { obs, method, theta } => commands::posterior(&obs.resolve()?, *method, theta),
        Command::Belief { obs, r, base, alpha } => {
            let base = match base {
                BaseArg::Cd => BeliefBase::Cd,
                BaseArg::Up => BeliefBase::Up,
            };
            commands::belief(&obs.resolve()?, base, *r, *alpha)
        }
        Command::Assess { obs, r } => commands::assess(&obs.resolve()?, *r),
        Command::Sim { experiment, theta0, sigma, k, reps, method, spec, at, r } => {
            let grid = ExperimentGrid::new(theta0.clone(), sigma.clone(), k.clone(), *reps, cli.seed)?;
            let settings = SimSettings {
                methods: method.iter().map(|&m| m.into()).collect(),
                spec: spec.resolve()?,
                eval_thetas: at.clone(),
                r: *r,
            };
            commands::sim(&lab, *experiment, &grid, &settings)
        }
        Command::Figures { name, reps } => commands::figure(&lab, *name, reps.unwrap_or(name.default_reps()), cli.seed),
    }
}

fn destination(cli: &Cli) -> Option<PathBuf> {
    let out = &cli.output;
    match (&out.output, &out.output_dir) {
        (Some(path), Some(dir)) if path.is_relative() => Some(dir.join(path)),
        (Some(path), _) => Some(path.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{}", cli.command.name(), out.format.extension()))),
        (None, None) => None,
    }
}

fn emit(cli: &Cli, table: &Table) -> Result<()> {
    let write = |w: &mut dyn Write| match cli.output.format {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    };
    match destination(cli) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
            eprintln!("wrote {} rows to {}", table.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

const EXIT_USAGE: u8 = 2;
const EXIT_FAILURE: u8 = 1;

/// Arguments that parse but violate a precondition count as usage errors;
/// numerical and I/O failures do not.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<confdist::Error>() {
        Some(confdist::Error::NumericalFailure(_)) | None => EXIT_FAILURE,
        Some(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match build(&cli).and_then(|t| emit(&cli, &t)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
