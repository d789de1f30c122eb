use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use cig_cli::config::{expand_lemmas, parse_lemma, resolve_qs, LemmaSel};
use cig_cli::output::{write_audits, write_reports};
use cig_cli::run::{audit_poly, parse_poly, run_export, run_verify, run_weil, Family};
use cig_cli::{CliError, Format, GraphCache, Result};
use cig_core::verify::CheckOptions;
use cig_core::FieldSpec;
use clap::{Args, Parser, Subcommand};

/// Commuting involution graphs of PSL(2,q): lemma checks, automorphism groups, exports.
#[derive(Parser)]
#[command(name = "cig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run lemma checks and emit one report per (q, lemma).
    Verify(VerifyArgs),
    /// Write the graph in DIMACS format.
    Export(ExportArgs),
    /// Audit the point-count bound on random members of a polynomial family.
    Weil(WeilArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Field order; repeatable.
    #[arg(long = "q", value_name = "Q")]
    q: Vec<u64>,
    /// Inclusive range `a..b`; keeps the prime powers above 3.
    #[arg(long = "q-range", value_name = "A..B")]
    q_range: Option<String>,
    #[arg(long, requires = "f")]
    p: Option<u64>,
    #[arg(long)]
    f: Option<u32>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<Vec<u32>> {
        resolve_qs(&self.q, self.q_range.as_deref(), self.p, self.f)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads across field orders (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Checks to run (comma-separated or repeated); `all` runs every applicable one.
    #[arg(long, value_delimiter = ',', value_parser = parse_lemma)]
    lemma: Vec<LemmaSel>,
    /// Same as `--lemma all`.
    #[arg(long)]
    all: bool,
    /// Abandon the automorphism search after this many seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long, env = "CIG_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random parameter choices for the point-count audit.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, env = "CIG_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeilArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Polynomial family; must match q mod 4 when given.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Audit `y² = f(x)` for this polynomial instead (coefficient encodings, constant term first).
    #[arg(long, value_name = "C0,C1,...")]
    poly: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let qs = args.field.resolve()?;
    let mut sel = args.lemma;
    if args.all {
        sel.push(LemmaSel::All);
    }
    let lemmas = expand_lemmas(&sel);
    let opts = CheckOptions {
        timeout: args.timeout_secs.map(Duration::from_secs),
        seed: args.seed,
        samples: args.samples,
    };
    let cache = args.cache_dir.map(GraphCache::new);
    let reports = run_verify(&qs, &lemmas, &opts, cache.as_ref(), args.out.jobs)?;
    if reports.is_empty() {
        return Err(CliError::Usage("none of the selected checks applies to the selected q".into()));
    }
    write_reports(io::stdout().lock(), args.out.format, &reports)?;
    Ok(reports.iter().all(|r| !r.is_failure()))
}

fn export(args: ExportArgs) -> Result<bool> {
    let qs = args.field.resolve()?;
    let [q] = qs[..] else {
        return Err(CliError::Usage("export takes exactly one field order".into()));
    };
    let cache = args.cache_dir.map(GraphCache::new);
    match args.out {
        Some(path) => {
            let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
            let mut w = BufWriter::new(file);
            run_export(q, cache.as_ref(), &mut w)?;
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        None => run_export(q, cache.as_ref(), io::stdout().lock())?,
    }
    Ok(true)
}

fn weil(args: WeilArgs) -> Result<bool> {
    let qs = args.field.resolve()?;
    if let Some(spec) = &args.poly {
        let mut audits = Vec::new();
        for &q in &qs {
            let k = FieldSpec::from_order(q as u64)?;
            audits.push(audit_poly(&k, &parse_poly(&k, spec)?));
        }
        write_audits(io::stdout().lock(), args.out.format, &audits)?;
        return Ok(audits.iter().all(|a| !a.is_failure()));
    }
    let reports = run_weil(&qs, args.family, args.samples, args.seed, args.out.jobs)?;
    write_reports(io::stdout().lock(), args.out.format, &reports)?;
    Ok(reports.iter().all(|r| !r.is_failure()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a),
        Command::Weil(a) => weil(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
