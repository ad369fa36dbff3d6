use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use secdeg::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "pa-secdeg",
    version,
    about = "Second degrees in the preferential-attachment graph G_m^n",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample G_m^n and write its edge list
    Generate(GenerateArgs),
    /// Degree and second-degree census of an edge-list file
    Stats(StatsArgs),
    /// Limiting constant tables c(l,k) and p(l,k)
    #[command(subcommand)]
    Analytic(AnalyticCommand),
    /// Exact expectations from the recurrences or full enumeration
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Seeded Monte-Carlo summaries over independent replicates
    Mc(McArgs),
    /// Theorem-level reports
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Source {
    Dp,
    Mc,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    /// Worker threads; defaults to all cores
    #[arg(long, env = "PA_SECDEG_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of vertices of G_m^n
    #[arg(long)]
    pub n: usize,
    /// Edges per vertex
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Base seed; replicate r uses a seed derived from (seed, r)
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Edge-list file written by `generate`
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Exit with status 2 if a census identity fails
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum AnalyticCommand {
    /// Table of c(l,k)
    Ctable(CtableArgs),
    /// Table of p(l,k)
    Ptable(PtableArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Largest degree row
    #[arg(long)]
    pub lmax: usize,
    /// Largest second degree reported
    #[arg(long)]
    pub kmax: usize,
    /// Arithmetic: exact rationals or float64
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CtableArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Run the series identity checks and report them on stderr
    #[arg(long)]
    pub check: bool,
    /// Tolerance for the total and row sums
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Tolerance for the column identity
    #[arg(long, default_value_t = 1e-9)]
    pub z_tol: f64,
    /// Rows with a row-sum check
    #[arg(long, default_value_t = 20)]
    pub rows: usize,
    /// Columns with a column identity check
    #[arg(long, default_value_t = 50)]
    pub z_columns: usize,
    /// Compare raw truncated sums, without the tail estimate
    #[arg(long)]
    pub no_tail: bool,
}

#[derive(Debug, Args)]
pub struct PtableArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Check p(l,k) <= 6/(l(l+1)) and report on stderr
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Expectations from the recurrences
    Dp(DpArgs),
    /// Expectations by enumerating every history
    Enum(EnumArgs),
    /// Recurrences against enumeration, cell by cell
    Diff(DiffArgs),
}

#[derive(Debug, Args)]
pub struct DpArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Largest degree row
    #[arg(long)]
    pub lmax: usize,
    /// Largest second degree reported
    #[arg(long)]
    pub kmax: usize,
    /// Largest degree for M1; defaults to lmax
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Arithmetic: exact rationals or float64
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Largest n accepted
    #[arg(long, default_value_t = secdeg::oracle::DEFAULT_ENUM_CAP)]
    pub cap: usize,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Arithmetic: exact rationals or float64
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Largest n accepted
    #[arg(long, default_value_t = secdeg::oracle::DEFAULT_ENUM_CAP)]
    pub cap: usize,
    /// Largest absolute difference accepted in float mode
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Edges per vertex
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Number of independent replicates
    #[arg(long)]
    pub reps: usize,
    /// Largest second degree reported
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    /// Largest degree reported
    #[arg(long, default_value_t = 20)]
    pub dmax: usize,
    /// Base seed; replicate r uses a seed derived from (seed, r)
    #[arg(long)]
    pub seed: u64,
    /// Index of the first replicate, for pooling separate runs
    #[arg(long, default_value_t = 0)]
    pub first_replicate: u64,
    /// Add recurrence and closed-form reference columns
    #[arg(long)]
    pub compare: bool,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Mean #(d) in G_m^n against 2nm(m+1)/(d(d+1)(d+2))
    Theorem1(Theorem1Args),
    /// Ratios k^2 M2_n(k)/(4n) against 1 +- C(ln^2 k/k + k^2/n)
    Theorem2(Theorem2Args),
    /// Deviations of X_n(k) beyond k sqrt(n) ln^2 n, and its spread
    Concentration(ConcentrationArgs),
    /// First-degree, joint-count and looped-vertex bounds
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct ReportOut {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct Theorem1Args {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Edges per vertex
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Largest degree reported
    #[arg(long, default_value_t = 10)]
    pub dmax: usize,
    /// Number of independent replicates
    #[arg(long)]
    pub reps: usize,
    /// Base seed; replicate r uses a seed derived from (seed, r)
    #[arg(long)]
    pub seed: u64,
    /// Largest relative error accepted
    #[arg(long, default_value_t = 0.10)]
    pub tol: f64,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct Theorem2Args {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Smallest second degree reported
    #[arg(long, default_value_t = 2)]
    pub kmin: usize,
    /// Largest second degree reported
    #[arg(long)]
    pub kmax: usize,
    /// Expectations from the recurrences, or Monte-Carlo means
    #[arg(long, value_enum, default_value = "dp")]
    pub source: Source,
    /// Replicates, with --source mc
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Required with --source mc
    #[arg(long)]
    pub seed: Option<u64>,
    /// Envelope constant C
    #[arg(long = "c", default_value_t = 5.0)]
    pub envelope_c: f64,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct ConcentrationArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Second degrees to examine, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    pub klist: Vec<usize>,
    /// Number of independent replicates
    #[arg(long)]
    pub reps: usize,
    /// Base seed; replicate r uses a seed derived from (seed, r)
    #[arg(long)]
    pub seed: u64,
    /// Largest coefficient of variation accepted
    #[arg(long, default_value_t = 0.1)]
    pub cv_max: f64,
    /// Smaller n whose coefficients of variation must not be beaten
    #[arg(long)]
    pub compare_n: Option<usize>,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Vertex counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub n_grid: Vec<usize>,
    /// Joint-count bound window
    #[arg(long, default_value_t = 20)]
    pub lmax: usize,
    /// Largest second degree reported
    #[arg(long, default_value_t = 30)]
    pub kmax: usize,
    #[command(flatten)]
    pub report: ReportOut,
}
