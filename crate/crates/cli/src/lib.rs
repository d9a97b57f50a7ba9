//! Command-line front end for `ssf-core`.

pub mod error;
pub mod output;
pub mod suite;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssf_core::divdiff::{divided_difference, KnotMultiset};
use ssf_core::funcspace::SmoothFunction;
use ssf_core::moi::PerturbedPair;
use ssf_core::sample::random_pair;
use ssf_core::spectral::HermitianOperator;
use ssf_core::ssf::{ssf_density, uniform_grid, Variant};

pub use error::{CliError, Result};
use output::{complex_sig15, density_csv, exact, StagedFiles};
use suite::{run_suite, trace_report, NamedPair, SuiteConfig};

/// Largest dimension accepted for seeded random pairs.
pub const MAX_RANDOM_DIM: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "ssf",
    version,
    about = "Higher-order spectral shift functions of Hermitian matrix pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the divided difference of a function at a knot list.
    Dd(DdArgs),
    /// Compute the spectral shift density of order p; write CSV and JSON.
    ComputeSsf(SsfArgs),
    /// Run the property suite on a pair or on seeded random pairs.
    Verify(VerifyArgs),
    /// Trace-formula records for one function at orders 1..=p.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct DdArgs {
    /// Function spec, e.g. `poly:0,0,1`, `exp:1`, `gauss:0,1`, `rat:0+1i`.
    #[arg(long = "f", value_parser = parse_function, allow_hyphen_values = true)]
    pub function: SmoothFunction,
    /// Comma-separated knots; the order is one less than their count.
    #[arg(long, value_parser = parse_knots, allow_hyphen_values = true)]
    pub knots: Knots,
    #[arg(long)]
    pub cluster_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Matrix file for H0.
    #[arg(long)]
    pub h0: Option<PathBuf>,
    /// Matrix file for V.
    #[arg(long)]
    pub v: Option<PathBuf>,
    /// Eigenvalue clustering tolerance.
    #[arg(long)]
    pub cluster_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SsfArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value = "nup1", value_parser = parse_variant)]
    pub variant: Variant,
    /// Sampling grid `a:b:m`; defaults to the hull padded by 10% with 1001 points.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Highest order checked.
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random pairs when no matrix files are given.
    #[arg(long, default_value_t = 1)]
    pub pairs: usize,
    /// Dimension of the random pairs.
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Perturb every density before checking it.
    #[arg(long, hide = true)]
    pub corrupt_eta: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub p: usize,
    #[arg(long = "f", value_parser = parse_function, allow_hyphen_values = true)]
    pub function: SmoothFunction,
    /// Restrict to one variant; both by default.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Knots(pub Vec<f64>);

/// `m` equispaced samples of `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub m: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        uniform_grid(self.a, self.b, self.m)
    }

    /// The hull `[c, d]` widened by 10% on each side, 1001 points.
    pub fn around_hull(c: f64, d: f64) -> Self {
        let pad = if d > c { 0.1 * (d - c) } else { 0.5 };
        Self {
            a: c - pad,
            b: d + pad,
            m: 1001,
        }
    }
}

fn parse_function(s: &str) -> std::result::Result<SmoothFunction, String> {
    SmoothFunction::parse(s).map_err(|e| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: ssf_core::Error| e.to_string())
}

fn parse_knots(s: &str) -> std::result::Result<Knots, String> {
    let knots = s
        .split(',')
        .map(|k| {
            k.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad knot `{k}`: {e}"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if knots.iter().any(|k| !k.is_finite()) {
        return Err("knots must be finite".into());
    }
    Ok(Knots(knots))
}

pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, m] = parts.as_slice() else {
        return Err(format!("grid `{s}` is not of the form a:b:m"));
    };
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad grid start: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad grid end: {e}"))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|e| format!("bad grid size: {e}"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("grid needs finite a < b, got {a}:{b}"));
    }
    if m < 2 {
        return Err(format!("grid needs at least 2 points, got {m}"));
    }
    Ok(Grid { a, b, m })
}

fn load_matrix(path: &Path) -> Result<HermitianOperator> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(HermitianOperator::from_json(&text)?)
}

fn build_pair(
    h0: HermitianOperator,
    v: HermitianOperator,
    cluster_tol: Option<f64>,
) -> Result<PerturbedPair> {
    Ok(match cluster_tol {
        Some(t) => PerturbedPair::with_cluster_tol(h0, v, t)?,
        None => PerturbedPair::new(h0, v)?,
    })
}

fn load_pair(args: &PairArgs) -> Result<NamedPair> {
    let (Some(h0), Some(v)) = (&args.h0, &args.v) else {
        return Err(CliError::Usage("both --h0 and --v are required".into()));
    };
    let pair = build_pair(load_matrix(h0)?, load_matrix(v)?, args.cluster_tol)?;
    Ok(NamedPair {
        name: h0.display().to_string(),
        pair,
    })
}

/// Seeded random pairs with `‖V‖₂ ∈ [0.3, 1]`.
pub fn random_pairs(
    seed: u64,
    count: usize,
    dim: usize,
    cluster_tol: Option<f64>,
) -> Result<Vec<NamedPair>> {
    if dim == 0 || dim > MAX_RANDOM_DIM {
        return Err(CliError::Usage(format!(
            "--dim must be in 1..={MAX_RANDOM_DIM}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let norm = rng.gen_range(0.3..=1.0);
            let (h0, v) = random_pair(&mut rng, dim, norm);
            Ok(NamedPair {
                name: format!("seed{seed}/{k}"),
                pair: build_pair(h0, v, cluster_tol)?,
            })
        })
        .collect()
}

fn jsonl<T: serde::Serialize>(records: &[T]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).map_err(ssf_core::Error::from)?);
        s.push('\n');
    }
    Ok(s)
}

fn write_or_print(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => {
            let mut staged = StagedFiles::new();
            staged.stage(p, text.as_bytes())?;
            staged.commit()
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: "stdout".into(),
                source,
            }),
    }
}

fn say(stdout: &mut dyn Write, line: String) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|source| CliError::Write {
        path: "stdout".into(),
        source,
    })
}

fn require_order(p: usize) -> Result<()> {
    if p == 0 {
        return Err(CliError::Usage("--p must be at least 1".into()));
    }
    Ok(())
}

pub fn cmd_dd(args: &DdArgs, stdout: &mut dyn Write) -> Result<()> {
    let knots = match args.cluster_tol {
        Some(t) => KnotMultiset::with_tolerance(args.knots.0.clone(), t)?,
        None => KnotMultiset::new(args.knots.0.clone())?,
    };
    let value = divided_difference(&args.function, &knots)?;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(CliError::NonFinite);
    }
    say(stdout, complex_sig15(value))
}

pub fn cmd_compute_ssf(args: &SsfArgs, stdout: &mut dyn Write) -> Result<()> {
    require_order(args.p)?;
    let named = load_pair(&args.pair)?;
    let result = ssf_density(&named.pair, args.p, args.variant)?;
    let (c, d) = result.hull;
    let grid = args
        .grid
        .unwrap_or_else(|| Grid::around_hull(c, d))
        .points();
    let values = result.density.sample(&grid);

    let mut staged = StagedFiles::new();
    staged.stage(
        with_suffix(&args.out, "csv"),
        density_csv(&grid, &values).as_bytes(),
    )?;
    staged.stage(
        with_suffix(&args.out, "json"),
        result.density.to_json()?.as_bytes(),
    )?;
    staged.commit()?;

    say(stdout, format!("order {}", result.order))?;
    say(stdout, format!("variant {}", result.variant))?;
    say(stdout, format!("hull {} {}", exact(c), exact(d)))?;
    say(stdout, format!("mass {}", complex_sig15(result.mass)))
}

/// `prefix.ext`, keeping any dots already in the prefix.
pub fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    require_order(args.p)?;
    let pairs = if args.pair.h0.is_some() || args.pair.v.is_some() {
        vec![load_pair(&args.pair)?]
    } else {
        random_pairs(args.seed, args.pairs, args.dim, args.pair.cluster_tol)?
    };
    let cfg = SuiteConfig {
        p_max: args.p,
        seed: args.seed,
        corrupt_eta: args.corrupt_eta,
    };
    let records = run_suite(&pairs, &cfg)?;
    write_or_print(args.out.as_deref(), &jsonl(&records)?, stdout)?;
    let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
    match failed.first() {
        None => Ok(()),
        Some(first) => Err(CliError::VerifyFailed {
            failed: failed.len(),
            total: records.len(),
            first: serde_json::to_string(first).map_err(ssf_core::Error::from)?,
        }),
    }
}

pub fn cmd_report(args: &ReportArgs, stdout: &mut dyn Write) -> Result<()> {
    require_order(args.p)?;
    let named = load_pair(&args.pair)?;
    let variants = match args.variant {
        Some(v) => vec![v],
        None => vec![Variant::Nup1, Variant::Nup2],
    };
    let records = trace_report(&named, &args.function, args.p, &variants)?;
    write_or_print(args.out.as_deref(), &jsonl(&records)?, stdout)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Dd(a) => cmd_dd(a, stdout),
        Command::ComputeSsf(a) => cmd_compute_ssf(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Report(a) => cmd_report(a, stdout),
    }
}
