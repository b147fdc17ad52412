//! `hrflow`: command-line front end for the homogeneous Ricci flow lab.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hrflow::sweep::Spacing;

#[derive(Parser, Debug)]
#[command(name = "hrflow", version, about = "Ricci flow on homogeneous spaces with two isotropy summands")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Catalog name (see `hrflow catalog`) or path to a space JSON file.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Output directory. Without it results go to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Collapse threshold on `x_i / max(x1, x2)`.
    #[arg(long, global = true)]
    pub collapse_eps: Option<f64>,
    /// Largest elapsed time of a run, in either direction.
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Format of tabular output. Reports are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Initial {
    #[arg(long, requires = "x2", conflicts_with_all = ["y0", "scale"])]
    pub x1: Option<f64>,
    #[arg(long, requires = "x1")]
    pub x2: Option<f64>,
    /// Initial ratio `x1 / x2`.
    #[arg(long)]
    pub y0: Option<f64>,
    /// Initial `x2` when starting from `--y0`.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in spaces, or print one as JSON with --space.
    Catalog,
    /// Check a space against the structural rules.
    Validate,
    /// Einstein directions, scale constants and separating lines.
    Einstein,
    /// Integrate from one initial metric and classify the run.
    Flow {
        #[command(flatten)]
        initial: Initial,
        /// Also write the backward trajectory.
        #[arg(long)]
        backward: bool,
    },
    /// Sample the vector field on a grid of metrics.
    Portrait {
        /// `lo:hi:n,lo:hi:n` for x1 then x2; points are lo + i(hi-lo)/n, i = 1..=n.
        #[arg(long)]
        grid: String,
    },
    /// Classify a family of initial directions.
    Sweep {
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "log")]
        spacing: Spacing,
        /// Initial `x2` of every run.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Rescale the forward run at its singularity and identify the limit.
    Blowup {
        #[command(flatten)]
        initial: Initial,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Catalog => commands::catalog(g),
        Command::Validate => commands::validate(g),
        Command::Einstein => commands::einstein(g),
        Command::Flow { initial, backward } => commands::flow(g, &initial, backward),
        Command::Portrait { grid } => commands::portrait(g, &grid),
        Command::Sweep {
            lo,
            hi,
            count,
            spacing,
            scale,
        } => commands::sweep(g, lo, hi, count, spacing, scale),
        Command::Blowup { initial } => commands::blowup(g, &initial),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hrflow: {}", e.message);
            ExitCode::from(e.status as u8)
        }
    }
}
