//! `rsum`: generate instances, solve them, cross-check against baselines and
//! benchmark.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 usage error, 3 capacity
//! exceeded with no fallback.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rsum_core::bench::{run_bench, write_csv, BenchConfig};
use rsum_core::instance::generate;
use rsum_core::{
    brute_force_rsum, meet_in_the_middle_rsum_with, solve, Fallback, Family, Instance, Ordinal,
    RsumError, SelectionKey, SolverConfig, ThresholdPolicy,
};

#[derive(Parser)]
#[command(name = "rsum", version, about = "Digit-projection rSUM solver and baselines")]
struct Cli {
    /// Worker threads for the solver's parallel phases (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    #[command(alias = "generate")]
    Gen(GenArgs),
    /// Solve an instance with the filtering solver; prints a JSON report.
    Solve(SolveArgs),
    /// Solve an instance with a baseline algorithm; prints a JSON report.
    Oracle(OracleArgs),
    /// Time the solver and baselines; prints CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Uniform,
    Planted,
    #[value(alias = "no-solution")]
    NoSolution,
    Adversarial,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Uniform => Family::Uniform,
            FamilyArg::Planted => Family::Planted,
            FamilyArg::NoSolution => Family::NoSolution,
            FamilyArg::Adversarial => Family::Adversarial,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long)]
    bound: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Arity, used by the planted and adversarial families.
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// Polynomial degree recorded as metadata.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

/// `auto` (n^(3/2r)), `secondary` (n^(1/2)/log^(1/r) n), `none`, or an integer.
#[derive(Clone, Copy, Debug)]
struct ThresholdArg(ThresholdPolicy);

impl FromStr for ThresholdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(ThresholdArg(match s {
            "auto" | "primary" => ThresholdPolicy::Primary,
            "secondary" => ThresholdPolicy::Secondary,
            "none" | "unlimited" => ThresholdPolicy::Unlimited,
            other => ThresholdPolicy::Fixed(
                other
                    .parse()
                    .map_err(|_| format!("expected auto, secondary, none or an integer, got {other:?}"))?,
            ),
        }))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    Mitm,
    Brute,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Tables,
    Variants,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    input: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value = "auto")]
    threshold: ThresholdArg,
    #[arg(long, value_enum, default_value = "mitm")]
    fallback: FallbackArg,
    #[arg(long)]
    allow_repeats: bool,
    #[arg(long, value_enum, default_value = "tables")]
    selection: SelectionArg,
    #[arg(long)]
    confluence_count: Option<usize>,
    #[arg(long)]
    block_width: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Brute,
    Mitm,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long)]
    allow_repeats: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    family: FamilyArg,
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 1 << 30)]
    bound: u64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    threshold: ThresholdArg,
    #[arg(long, value_enum, default_value = "tables")]
    selection: SelectionArg,
    /// Only time the filter passes.
    #[arg(long)]
    filter_only: bool,
    /// Largest size at which brute force is timed.
    #[arg(long, default_value_t = 200)]
    brute_max_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct OracleReport {
    n: usize,
    r: usize,
    algo: &'static str,
    solutions: Vec<Vec<Ordinal>>,
    values: Vec<Vec<i64>>,
    timings_ms: OracleTimings,
}

#[derive(Serialize)]
struct OracleTimings {
    total: f64,
}

fn exit_code(err: &RsumError) -> u8 {
    match err {
        RsumError::Capacity { .. } => 3,
        RsumError::Domain(_) | RsumError::Generation(_) => 2,
        RsumError::Io(_) | RsumError::Parse { .. } | RsumError::Consistency(_) => 1,
    }
}

fn emit(json: &impl Serialize, out: Option<&PathBuf>, pretty: bool) -> Result<(), RsumError> {
    let text = if pretty {
        serde_json::to_string_pretty(json)
    } else {
        serde_json::to_string(json)
    }
    .map_err(|e| RsumError::Io(io::Error::other(e)))?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn load(path: &PathBuf, r: usize) -> Result<Instance, RsumError> {
    let inst = Instance::read(path)?;
    inst.validate(r)?;
    Ok(inst)
}

fn cmd_gen(args: GenArgs) -> Result<(), RsumError> {
    let mut inst = generate(&args.family.into(), args.n as usize, args.bound, args.r, args.seed)?;
    inst.m = args.m;
    inst.write(&args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn solver_config(r: usize, threshold: ThresholdArg, selection: SelectionArg) -> SolverConfig {
    SolverConfig {
        threshold: threshold.0,
        selection: match selection {
            SelectionArg::Tables => SelectionKey::Tables,
            SelectionArg::Variants => SelectionKey::Variants,
        },
        ..SolverConfig::new(r)
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), RsumError> {
    let inst = load(&args.input, args.r)?;
    let config = SolverConfig {
        allow_repeated_ordinals: args.allow_repeats,
        fallback: match args.fallback {
            FallbackArg::Mitm => Fallback::MeetInTheMiddle,
            FallbackArg::Brute => Fallback::BruteForce,
            FallbackArg::None => Fallback::None,
        },
        confluence_count: args.confluence_count,
        block_width: args.block_width,
        ..solver_config(args.r, args.threshold, args.selection)
    };
    match solve(&inst.values, &config) {
        Ok(mut report) => {
            report.m = inst.m;
            emit(&report, args.out.as_ref(), args.pretty)
        }
        Err(RsumError::Capacity { variants, threshold, mut report }) => {
            report.m = inst.m;
            emit(&report, args.out.as_ref(), args.pretty)?;
            Err(RsumError::Capacity { variants, threshold, report })
        }
        Err(e) => Err(e),
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<(), RsumError> {
    let inst = load(&args.input, args.r)?;
    let omega = &inst.values;
    let start = Instant::now();
    let (algo, solutions) = match args.algo {
        AlgoArg::Brute => ("brute", brute_force_rsum(omega, args.r, args.allow_repeats)?),
        AlgoArg::Mitm => ("mitm", meet_in_the_middle_rsum_with(omega, args.r, args.allow_repeats)?),
    };
    let total = start.elapsed().as_secs_f64() * 1e3;
    let values = solutions
        .iter()
        .map(|s| s.iter().map(|&o| omega[o as usize]).collect())
        .collect();
    let report = OracleReport {
        n: omega.len(),
        r: args.r,
        algo,
        solutions,
        values,
        timings_ms: OracleTimings { total },
    };
    emit(&report, args.out.as_ref(), args.pretty)
}

fn cmd_bench(args: BenchArgs) -> Result<(), RsumError> {
    let mut cfg = BenchConfig::new(args.family.into(), args.sizes, args.r);
    cfg.bound = args.bound;
    cfg.reps = args.reps;
    cfg.seed = args.seed;
    cfg.solver = solver_config(args.r, args.threshold, args.selection);
    cfg.filter_only = args.filter_only;
    cfg.brute_max_n = args.brute_max_n;
    let rows = run_bench(&cfg)?;
    match &args.out {
        Some(path) => {
            write_csv(io::BufWriter::new(fs::File::create(path)?), &rows)?;
            println!("{}", path.display());
        }
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("rsum: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rsum: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
