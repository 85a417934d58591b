use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Auto,
}

#[derive(Debug, Parser)]
#[command(name = "spectral-moments", version, about = "Spectral moments and eigenvalue bounds from local graph structure")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Numerical tolerance for bisection and the SDP.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true, env = "SPECTRAL_MOMENTS_THREADS")]
    pub threads: Option<usize>,
    /// Read a moment sequence `{n, m, source}` instead of a graph.
    #[arg(long, global = true, value_name = "PATH")]
    pub moments_file: Option<PathBuf>,
    /// Synthetic input `kind:n[:p]`, kinds ring, complete, star, path, erdos_renyi.
    #[arg(long, global = true, value_name = "SPEC")]
    pub generate: Option<String>,
    /// Label of the first node in edge-list files.
    #[arg(long, global = true, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub index_base: u64,
    /// Drop duplicate edges and self-loops instead of rejecting the file.
    #[arg(long, global = true)]
    pub dedup: bool,
    /// Largest graph handed to the dense eigensolver.
    #[arg(long, global = true, default_value_t = spectral_moments::spectrum::DEFAULT_SPECTRUM_CAP)]
    pub spectrum_cap: usize,
}

#[derive(Debug, Clone, Args, Default)]
pub struct EigencountOpts {
    /// Closed interval `lo,hi` to bound the eigenvalue fraction of; repeatable.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub interval: Vec<String>,
    /// CDF sweep `lo:step:hi` with `T = [Ω_lo, α]`.
    #[arg(long, value_name = "LO:STEP:HI", allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// Interval `lo,hi` assumed to contain every eigenvalue.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Number of moments used, 2..=5.
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Census, moments, feasibility, bounds, estimators and (small graphs) the spectrum.
    Analyze {
        path: Option<PathBuf>,
        #[command(flatten)]
        eigencount: EigencountOpts,
    },
    /// Per-node degree, triangle, quadrangle and pentagon counts.
    Census { path: Option<PathBuf> },
    /// Spectral moments m_0..m_5 by every available route.
    Moments { path: Option<PathBuf> },
    /// Support bounds on the extreme eigenvalues.
    Bounds {
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        level: Level,
        /// Bisect instead of using the closed forms.
        #[arg(long)]
        bisect: bool,
    },
    /// Spectral-radius estimators and classical bounds.
    Estimate { path: Option<PathBuf> },
    /// Upper bounds on the fraction of eigenvalues in intervals.
    Eigencount {
        path: Option<PathBuf>,
        #[command(flatten)]
        opts: EigencountOpts,
        /// Also solve the discretized primal on this many grid points.
        #[arg(long)]
        lp_grid: Option<usize>,
    },
    /// Dense spectrum, CDF points and histogram.
    Spectrum {
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Analyze radius-limited ego subgraphs around seeded random roots.
    SampleEgo {
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Flatten saved `analyze` JSON reports into one CSV table.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}
