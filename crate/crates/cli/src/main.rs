//! `acro`: run experiments, check the benchmark suite, list what is available.

use std::path::PathBuf;
use std::process::ExitCode;

use acro_core::benchmarks::golden_checks;
use acro_core::harness::{emit_partial, DEFAULT_TRANSFORM_SEED};
use acro_core::{emit_results, run_experiment, BenchmarkId, CroError, ExperimentConfig, Variant};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "acro",
    version,
    about = "Chemical reaction optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, function, seed) combination and write results.
    Run(RunArgs),
    /// Evaluate every benchmark at its constructed optimum and other known points.
    VerifyBenchmarks {
        #[arg(long, default_value_t = 30)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_TRANSFORM_SEED)]
        transform_seed: u64,
    },
    /// List algorithm tags and benchmark ids.
    List,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Comma-separated algorithm tags (e.g. ACRO/BP,CRO/D) or `all`.
    #[arg(long, default_value = "all")]
    algo: String,
    /// Comma-separated benchmark ids (e.g. f1,f19) or `all`.
    #[arg(long, default_value = "all")]
    func: String,
    #[arg(long, default_value_t = 30)]
    dim: usize,
    #[arg(long, default_value_t = 51)]
    runs: u64,
    #[arg(long, default_value_t = 300_000)]
    max_fes: u64,
    /// Run `k` uses seed `seed + k`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Directory of raw shift/rotation files to use instead of generated data.
    #[arg(long)]
    cec_data: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRANSFORM_SEED)]
    transform_seed: u64,
}

/// Error reported as one JSON line on stderr.
struct Failure {
    kind: &'static str,
    message: String,
    extra: serde_json::Value,
}

impl From<CroError> for Failure {
    fn from(e: CroError) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
            extra: serde_json::Value::Null,
        }
    }
}

fn parse_list<T>(
    raw: &str,
    all: impl Fn() -> Vec<T>,
    parse: impl Fn(&str) -> Result<T, CroError>,
) -> Result<Vec<T>, CroError> {
    if raw.trim().eq_ignore_ascii_case("all") {
        return Ok(all());
    }
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let algorithms = parse_list(&args.algo, || Variant::ALL.to_vec(), str::parse)?;
    let benchmarks = parse_list(&args.func, || BenchmarkId::all().collect(), str::parse)?;
    let cfg = ExperimentConfig {
        dimension: args.dim,
        runs: args.runs,
        max_fes: args.max_fes,
        base_seed: args.seed,
        parallelism: args.parallel,
        transform_seed: args.transform_seed,
        cec_data: args.cec_data,
        ..ExperimentConfig::new(algorithms, benchmarks)
    };
    let experiment = match run_experiment(&cfg) {
        Ok(e) => e,
        Err(failure) => {
            if !failure.completed.is_empty() {
                emit_partial(&failure.completed, &args.out)?;
            }
            return Err(Failure {
                kind: failure.source.kind(),
                message: failure.to_string(),
                extra: json!({
                    "algorithm": failure.algorithm.tag(),
                    "benchmark": failure.benchmark.to_string(),
                    "seed": failure.seed,
                    "completed_runs": failure.completed.len(),
                }),
            });
        }
    };
    emit_results(&experiment.summary, &experiment.records, &args.out)?;
    let summary = std::fs::read_to_string(args.out.join("summary.csv")).map_err(|e| {
        Failure::from(CroError::Io {
            path: args.out.join("summary.csv"),
            source: e,
        })
    })?;
    print!("{summary}");
    eprintln!(
        "{} runs written to {}",
        experiment.records.len(),
        args.out.display()
    );
    Ok(())
}

fn verify(dim: usize, transform_seed: u64) -> Result<(), Failure> {
    if dim == 0 {
        return Err(CroError::InvalidConfig("dimension must be at least 1".into()).into());
    }
    let checks = golden_checks(dim, transform_seed);
    let mut failed = Vec::new();
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<32} value {:e} (expected {:e} ± {:e})",
            c.name, c.value, c.expected, c.tolerance
        );
        if !c.passed() {
            failed.push(c.name.clone());
        }
    }
    if failed.is_empty() {
        println!("{} of {} checks passed", checks.len(), checks.len());
        Ok(())
    } else {
        Err(Failure {
            kind: "GoldenMismatch",
            message: format!("{} of {} golden checks failed", failed.len(), checks.len()),
            extra: json!({ "failed": failed }),
        })
    }
}

fn list() {
    println!("algorithms:");
    for v in Variant::ALL {
        println!("  {v}");
    }
    println!("functions:");
    for id in BenchmarkId::all() {
        let info = id.info();
        println!("  {id:<4} {:<32} scale {}", info.name, info.scale);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.render().to_string();
            report(Failure {
                kind: "UsageError",
                message: message.lines().next().unwrap_or_default().to_string(),
                extra: serde_json::Value::Null,
            });
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::VerifyBenchmarks {
            dim,
            transform_seed,
        } => verify(dim, transform_seed),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(f);
            ExitCode::FAILURE
        }
    }
}

fn report(f: Failure) {
    let mut line = json!({ "error": f.kind, "message": f.message });
    if let serde_json::Value::Object(extra) = f.extra {
        line.as_object_mut().unwrap().extend(extra);
    }
    eprintln!("{line}");
}
