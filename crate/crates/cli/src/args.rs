//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mdslab",
    version,
    about = "Multidimensional scaling experiments on finite and infinite metric measure spaces",
    disable_help_subcommand = true,
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    /// Run the experiment described by a JSON config instead of a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite metric measure spaces.
    #[command(subcommand)]
    Space(SpaceCommand),
    /// Finite MDS.
    #[command(subcommand)]
    Mds(MdsCommand),
    /// Kernel spectra on spheres.
    #[command(subcommand)]
    Sphere(SphereCommand),
    /// Perturbation and convergence experiments.
    #[command(subcommand)]
    Stability(StabilityCommand),
    /// Product spaces.
    #[command(subcommand)]
    Product(ProductCommand),
    /// Flat tori.
    #[command(subcommand)]
    Torus(TorusCommand),
}

#[derive(Debug, Subcommand)]
pub enum SpaceCommand {
    /// Sample an analytic space into a finite space file.
    Gen(SpaceGen),
}

#[derive(Debug, Subcommand)]
pub enum MdsCommand {
    /// Embed a finite space with the top `m` positive eigenpairs.
    Embed(MdsEmbed),
    /// Write the full positive and negative parts of the Krein map.
    Krein(MdsKrein),
}

#[derive(Debug, Subcommand)]
pub enum SphereCommand {
    /// One kernel eigenvalue on a sphere.
    Eigen(SphereEigen),
    /// Decay of the positive eigenvalues.
    Asymptotics(SphereAsymptotics),
}

#[derive(Debug, Subcommand)]
pub enum StabilityCommand {
    /// Convergence of grid embeddings to the limit map.
    Converge(StabilityConverge),
}

#[derive(Debug, Subcommand)]
pub enum ProductCommand {
    /// Compare the product of two finite spaces with its factors.
    Check(ProductCheck),
}

#[derive(Debug, Subcommand)]
pub enum TorusCommand {
    /// Check the flat-torus distance identity.
    Check(TorusCheck),
}

#[derive(Debug, Args)]
pub struct SpaceGen {
    /// circle, sphere(d), torus(k), snowflake(<space>,alpha) or product(<space>,<space>).
    #[arg(long)]
    pub space: String,
    /// Sample size (points per circle factor for grids).
    #[arg(long)]
    pub sizes: usize,
    /// grid or uniform.
    #[arg(long, default_value = "grid")]
    pub mode: String,
    /// Seed for uniform sampling; falls back to MDSLAB_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MdsEmbed {
    /// Finite space CSV.
    #[arg(long, alias = "space")]
    pub input: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MdsKrein {
    #[arg(long, alias = "space")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SphereEigen {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub degree: usize,
    /// series or quadrature.
    #[arg(long, default_value = "quadrature")]
    pub method: String,
    /// full or snowflake.
    #[arg(long, default_value = "full")]
    pub kind: String,
    /// Relative tolerance of the series.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SphereAsymptotics {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub nmin: usize,
    #[arg(long)]
    pub nmax: usize,
    #[arg(long, default_value_t = mdslab_core::sphere::SCAN_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityConverge {
    #[arg(long, default_value = "circle")]
    pub space: String,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Exponent of the image distortion column.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Worker threads; rows are independent and written in input order.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProductCheck {
    /// Two finite space CSV files, comma-separated.
    #[arg(long, alias = "space", value_delimiter = ',', num_args = 1.., required = true)]
    pub factors: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TorusCheck {
    /// Grid points per circle factor.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Number of circle factors.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Highest frequency kept per factor.
    #[arg(long, default_value_t = 99)]
    pub trunc: usize,
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Falls back to MDSLAB_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
