//! `welch`: generate vector sets, evaluate Welch-type bounds, minimize frame
//! potentials and scan Gram ranks from the command line.
//!
//! Exit codes: 0 success (inequality holds), 1 inequality violated,
//! 2 argument error, 3 I/O error, 4 numerical precondition failure.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use welch_kernel::bounds::{
    coherence, coherence_report, generalized_report, proposition1_report, shifted_report, shifted_unit_report,
    welch_sum_report, BoundReport, InequalityId,
};
use welch_kernel::features::feature_matrix;
use welch_kernel::formats::VectorSetFile;
use welch_kernel::frames::{minimize_frame_potential, orthonormal_frame, random_unit_vectors, simplex_frame, OptimizerConfig};
use welch_kernel::kernels::{gram_matrix, Field, KernelSpec, VectorSet};
use welch_kernel::linalg::{numerical_rank, RankPolicy};
use welch_kernel::rank::rank_scan_with_thresholds;

use crate::config::{OutputFormat, RankScanConfig};
use crate::output::{read_text, write_atomic, CliError};

/// Maximum entrywise error accepted between DᴴD and G.
const EMBED_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "welch", version, about = "Kernel Gram matrices and Welch-type bounds")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (prefix for rank-scan).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a vector set file.
    Gen(GenArgs),
    /// Evaluate one inequality on a vector set file.
    Check(CheckArgs),
    /// Minimize the frame potential of m unit vectors in Cⁿ.
    Optimize(OptimizeArgs),
    /// Scan Gram ε-ranks over a kernel family.
    RankScan(RankScanArgs),
    /// Compare the explicit feature map against the kernel Gram matrix.
    EmbedCheck(EmbedCheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Random,
    Simplex,
    Orthonormal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of vectors (random only).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "complex")]
    field: FieldArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelArg {
    Homogeneous,
    Shifted,
    Gaussian,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// eq1, eq2, prop1, generalized, eq6, eq7 (or the long ids).
    #[arg(long)]
    inequality: String,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long)]
    c: Option<f64>,
    /// Kernel for prop1; defaults to shifted when --c is given, homogeneous otherwise.
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    step_init: Option<f64>,
    #[arg(long)]
    armijo_c: Option<f64>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args, Debug)]
struct RankScanArgs {
    /// JSON or TOML scan configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct EmbedCheckArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    c: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let seed = cli.seed;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen(args) => cmd_gen(args, seed.unwrap_or(0), out),
        Command::Check(args) => cmd_check(args, out),
        Command::Optimize(args) => cmd_optimize(args, seed.unwrap_or(0), out),
        Command::RankScan(args) => cmd_rank_scan(args, seed, out),
        Command::EmbedCheck(args) => cmd_embed_check(args, out),
    }
}

fn load_vectors(path: &Path) -> Result<VectorSet, CliError> {
    let text = read_text(path)?;
    Ok(VectorSetFile::from_json(&text)?)
}

/// Writes `body` to `out` and `summary` to stdout, or `body` to stdout and
/// `summary` to stderr when no output path is given.
fn emit(out: Option<&Path>, body: &str, summary: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_atomic(path, body.as_bytes())?;
            println!("{summary}");
        }
        None => {
            println!("{body}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs, seed: u64, out: Option<&Path>) -> Result<u8, CliError> {
    let vs = match args.kind {
        Kind::Random => {
            let m = args.m.ok_or_else(|| CliError::Usage("--m is required for --kind random".into()))?;
            random_unit_vectors(m, args.n, args.field.into(), seed)?
        }
        Kind::Simplex => simplex_frame(args.n)?,
        Kind::Orthonormal => orthonormal_frame(args.n)?,
    };
    let summary = match coherence(&vs) {
        Ok(mu) => format!("m={} n={} coherence={mu}", vs.m(), vs.n()),
        Err(_) => format!("m={} n={} coherence=n/a", vs.m(), vs.n()),
    };
    emit(out, &VectorSetFile::to_json(&vs), &summary)?;
    Ok(0)
}

fn kernel_for_check(args: &CheckArgs) -> Result<KernelSpec, CliError> {
    let kind = args.kernel.unwrap_or(if args.c.is_some() { KernelArg::Shifted } else { KernelArg::Homogeneous });
    let spec = match kind {
        KernelArg::Homogeneous => KernelSpec::homogeneous(args.p)?,
        KernelArg::Shifted => KernelSpec::shifted(args.p, args.c.unwrap_or(0.0))?,
        KernelArg::Gaussian => {
            let gamma = args.gamma.ok_or_else(|| CliError::Usage("--gamma is required for the gaussian kernel".into()))?;
            KernelSpec::gaussian(gamma)?
        }
    };
    Ok(spec)
}

fn require_c(args: &CheckArgs, id: InequalityId) -> Result<f64, CliError> {
    args.c.ok_or_else(|| CliError::Usage(format!("--c is required for {id}")))
}

fn cmd_check(args: CheckArgs, out: Option<&Path>) -> Result<u8, CliError> {
    let id: InequalityId = args.inequality.parse().map_err(|e: welch_kernel::Error| CliError::Usage(e.to_string()))?;
    let vs = load_vectors(&args.input)?;
    let report: BoundReport = match id {
        InequalityId::WelchCoherence => coherence_report(&vs, args.p)?,
        InequalityId::WelchSum => welch_sum_report(&vs, args.p)?,
        InequalityId::Proposition1 => proposition1_report(&gram_matrix(&kernel_for_check(&args)?, &vs)?)?,
        InequalityId::Generalized => generalized_report(&vs, args.p)?,
        InequalityId::Shifted => shifted_report(&vs, args.p, require_c(&args, id)?)?,
        InequalityId::ShiftedUnit => shifted_unit_report(&vs, args.p, require_c(&args, id)?)?,
    };
    let line = serde_json::to_string(&report).expect("report serializes");
    println!("{line}");
    if let Some(path) = out {
        write_atomic(path, format!("{line}\n").as_bytes())?;
    }
    Ok(if report.holds { 0 } else { 1 })
}

fn cmd_optimize(args: OptimizeArgs, seed: u64, out: Option<&Path>) -> Result<u8, CliError> {
    let d = OptimizerConfig::default();
    let cfg = OptimizerConfig {
        p: args.p,
        max_iters: args.max_iters.unwrap_or(d.max_iters),
        step_init: args.step_init.unwrap_or(d.step_init),
        armijo_c: args.armijo_c.unwrap_or(d.armijo_c),
        grad_tol: args.grad_tol.unwrap_or(d.grad_tol),
        restarts: args.restarts.unwrap_or(d.restarts),
        seed,
    };
    let result = minimize_frame_potential(args.m, args.n, &cfg)?;
    let body = serde_json::to_string_pretty(&result).expect("result serializes");
    let summary = format!(
        "final_potential={} bound={} gap={} iterations={}",
        result.final_potential, result.bound, result.gap, result.iterations
    );
    emit(out, &body, &summary)?;
    Ok(0)
}

#[derive(Serialize)]
struct EmbedReport {
    p: u32,
    c: Option<f64>,
    m: usize,
    n: usize,
    embedding_dim: usize,
    rank: usize,
    max_error: f64,
    ok: bool,
}

fn cmd_embed_check(args: EmbedCheckArgs, out: Option<&Path>) -> Result<u8, CliError> {
    let vs = load_vectors(&args.input)?;
    let spec = match args.c {
        Some(c) => KernelSpec::shifted(args.p, c)?,
        None => KernelSpec::homogeneous(args.p)?,
    };
    let features = feature_matrix(&spec, &vs)?;
    let gram = gram_matrix(&spec, &vs)?;
    let dd = features.gram()?;
    let max_error = dd
        .as_slice()
        .iter()
        .zip(gram.matrix().as_slice())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let rank = numerical_rank(&gram.spectrum()?, RankPolicy::default());
    let report = EmbedReport {
        p: args.p,
        c: args.c,
        m: vs.m(),
        n: vs.n(),
        embedding_dim: features.feature_dim(),
        rank,
        max_error,
        ok: max_error < EMBED_TOL,
    };
    let line = serde_json::to_string(&report).expect("report serializes");
    println!("{line}");
    if let Some(path) = out {
        write_atomic(path, format!("{line}\n").as_bytes())?;
    }
    Ok(if report.ok { 0 } else { 1 })
}

fn cmd_rank_scan(args: RankScanArgs, seed: Option<u64>, out: Option<&Path>) -> Result<u8, CliError> {
    let cfg = RankScanConfig::load(&args.config)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let scan = rank_scan_with_thresholds(&cfg.kernels, cfg.n, cfg.m, cfg.trials, seed, &cfg.thresholds())?;

    let prefix = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
    if let Some(prefix) = prefix {
        if matches!(cfg.format, OutputFormat::Csv | OutputFormat::Both) {
            write_atomic(&prefix.with_extension("csv"), scan.csv_string()?.as_bytes())?;
        }
        if matches!(cfg.format, OutputFormat::Json | OutputFormat::Both) {
            write_atomic(&prefix.with_extension("json"), format!("{}\n", scan.summary_json()).as_bytes())?;
        }
    }

    println!("{:<28} {:>11} {:>15} {:>10}", "kernel", "median_rank", "theoretical_dim", "saturated");
    for s in &scan.summary {
        let dim = s.theoretical_dim.map_or("-".to_string(), |d| d.to_string());
        let sat = s.saturated.map_or("-".to_string(), |b| b.to_string());
        println!("{:<28} {:>11} {:>15} {:>10}", s.label, s.median_rank, dim, sat);
    }
    Ok(0)
}
