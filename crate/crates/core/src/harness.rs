//! Experiment orchestration: many seeded runs, per-cell statistics and the
//! CSV/JSONL artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run, AlgorithmConfig, TracePoint, Variant};
use crate::benchmarks::{import_cec_transform, BenchmarkId, BenchmarkInstance};
use crate::error::{CroError, Result};

/// Final values below this are reported as exactly 0.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

pub fn truncate(value: f64) -> f64 {
    if value < TRUNCATION_THRESHOLD {
        0.0
    } else {
        value
    }
}

/// One finished run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Variant,
    pub benchmark: BenchmarkId,
    pub dimension: usize,
    pub seed: u64,
    pub final_raw: f64,
    pub final_reported: f64,
    pub trace: Vec<TracePoint>,
    /// Seconds; informational only.
    pub wall_time: f64,
}

/// Statistics of one (algorithm, benchmark) cell over reported values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub algorithm: Variant,
    pub benchmark: BenchmarkId,
    pub runs: usize,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Five-number description of a non-empty sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        Some(Stats {
            mean,
            median,
            std: var.sqrt(),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    /// Sorted by algorithm, then benchmark.
    pub cells: Vec<CellStats>,
}

impl ExperimentSummary {
    pub fn cell(&self, algorithm: Variant, benchmark: BenchmarkId) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.benchmark == benchmark)
    }

    pub fn algorithms(&self) -> Vec<Variant> {
        let mut v: Vec<_> = self.cells.iter().map(|c| c.algorithm).collect();
        v.dedup();
        v
    }

    pub fn benchmarks(&self) -> Vec<BenchmarkId> {
        let mut v: Vec<_> = self.cells.iter().map(|c| c.benchmark).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Fails with `EmptyCell` unless every requested cell is present.
    pub fn require(&self, algorithms: &[Variant], benchmarks: &[BenchmarkId]) -> Result<()> {
        for &a in algorithms {
            for &b in benchmarks {
                if self.cell(a, b).is_none() {
                    return Err(CroError::EmptyCell {
                        algorithm: a.to_string(),
                        benchmark: b.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Groups records by (algorithm, benchmark) and computes statistics over the
/// truncated final values.
pub fn summarize(records: &[RunRecord]) -> Result<ExperimentSummary> {
    if records.is_empty() {
        return Err(CroError::NoRecords);
    }
    let mut groups: BTreeMap<(Variant, BenchmarkId), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.algorithm, r.benchmark))
            .or_default()
            .push(truncate(r.final_reported));
    }
    let cells = groups
        .into_iter()
        .map(|((algorithm, benchmark), values)| {
            let s = Stats::of(&values).expect("groups are never empty");
            CellStats {
                algorithm,
                benchmark,
                runs: values.len(),
                mean: s.mean,
                median: s.median,
                std: s.std,
                min: s.min,
                max: s.max,
            }
        })
        .collect();
    Ok(ExperimentSummary { cells })
}

/// Everything that defines an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Variant>,
    pub benchmarks: Vec<BenchmarkId>,
    pub dimension: usize,
    pub runs: u64,
    pub max_fes: u64,
    pub base_seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub parallelism: usize,
    /// Seed of the generated shift vectors and rotation matrices.
    pub transform_seed: u64,
    /// Directory with CEC-style transform files to use instead of generated ones.
    pub cec_data: Option<PathBuf>,
}

pub const DEFAULT_TRANSFORM_SEED: u64 = 2013;

impl ExperimentConfig {
    pub fn new(algorithms: Vec<Variant>, benchmarks: Vec<BenchmarkId>) -> Self {
        ExperimentConfig {
            algorithms,
            benchmarks,
            dimension: 30,
            runs: 51,
            max_fes: crate::algorithms::DEFAULT_MAX_FES,
            base_seed: 0,
            parallelism: 0,
            transform_seed: DEFAULT_TRANSFORM_SEED,
            cec_data: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(CroError::InvalidConfig("runs must be at least 1".into()));
        }
        if self.dimension == 0 {
            return Err(CroError::InvalidConfig(
                "dimension must be at least 1".into(),
            ));
        }
        if self.algorithms.is_empty() || self.benchmarks.is_empty() {
            return Err(CroError::InvalidConfig(
                "need at least one algorithm and one benchmark".into(),
            ));
        }
        for &v in &self.algorithms {
            AlgorithmConfig::defaults(v, self.max_fes).validate()?;
        }
        Ok(())
    }

    fn instances(&self) -> Result<Vec<BenchmarkInstance>> {
        self.benchmarks
            .iter()
            .map(|&id| match &self.cec_data {
                Some(dir) => Ok(BenchmarkInstance::new(import_cec_transform(
                    dir,
                    id,
                    self.dimension,
                )?)),
                None => Ok(BenchmarkInstance::generate(
                    id,
                    self.dimension,
                    self.transform_seed,
                )),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub summary: ExperimentSummary,
    /// In (algorithm, benchmark, run) order.
    pub records: Vec<RunRecord>,
}

/// A run failed. `completed` holds every run that did finish.
#[derive(Debug, thiserror::Error)]
#[error("{algorithm} on {benchmark} with seed {seed}: {source}")]
pub struct ExperimentFailure {
    pub algorithm: Variant,
    pub benchmark: BenchmarkId,
    pub seed: u64,
    #[source]
    pub source: CroError,
    pub completed: Vec<RunRecord>,
}

impl ExperimentFailure {
    fn setup(source: CroError) -> Self {
        ExperimentFailure {
            algorithm: Variant::AcroBp,
            benchmark: BenchmarkId::new(1).unwrap(),
            seed: 0,
            source,
            completed: Vec::new(),
        }
    }
}

/// Runs one optimizer on one instance with the given seed.
pub fn run_single(
    instance: &BenchmarkInstance,
    cfg: &AlgorithmConfig,
    seed: u64,
) -> Result<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let started = Instant::now();
    let outcome = run(instance, cfg, &mut rng, &mut ())?;
    Ok(RunRecord {
        algorithm: cfg.variant,
        benchmark: instance.id(),
        dimension: instance.transform().dimension(),
        seed,
        final_raw: outcome.best_pe,
        final_reported: truncate(outcome.best_pe),
        trace: outcome.trace,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Every (algorithm, benchmark, run) combination with seed `base_seed + run`.
/// Results do not depend on `parallelism`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
) -> std::result::Result<Experiment, Box<ExperimentFailure>> {
    let setup = |e| Box::new(ExperimentFailure::setup(e));
    cfg.validate().map_err(setup)?;
    let instances = cfg.instances().map_err(setup)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| setup(CroError::InvalidConfig(format!("thread pool: {e}"))))?;

    let mut jobs = Vec::new();
    for &variant in &cfg.algorithms {
        let algo = AlgorithmConfig::defaults(variant, cfg.max_fes);
        for inst in &instances {
            for run in 0..cfg.runs {
                jobs.push((algo.clone(), inst, cfg.base_seed.wrapping_add(run)));
            }
        }
    }
    let results: Vec<(Variant, BenchmarkId, u64, Result<RunRecord>)> = pool.install(|| {
        jobs.par_iter()
            .map(|(algo, inst, seed)| {
                (
                    algo.variant,
                    inst.id(),
                    *seed,
                    run_single(inst, algo, *seed),
                )
            })
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (algorithm, benchmark, seed, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(source) if first_error.is_none() => {
                first_error = Some((algorithm, benchmark, seed, source));
            }
            Err(_) => {}
        }
    }
    if let Some((algorithm, benchmark, seed, source)) = first_error {
        return Err(Box::new(ExperimentFailure {
            algorithm,
            benchmark,
            seed,
            source,
            completed: records,
        }));
    }
    let summary = summarize(&records).map_err(setup)?;
    summary
        .require(&cfg.algorithms, &cfg.benchmarks)
        .map_err(setup)?;
    Ok(Experiment { summary, records })
}

/// Scientific notation with four decimals and an exponent of at least two
/// digits: `2.7374e-06`, `0.0000e+00`.
pub fn format_sci(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let raw = format!("{value:.4e}");
    let (mantissa, exp) = raw.split_once('e').expect("`e` formatting has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Writes `summary.csv`, `stats.csv`, `records.jsonl` and `traces.csv` into
/// `out_dir`. Nothing is written for an empty record set.
pub fn emit_results(
    summary: &ExperimentSummary,
    records: &[RunRecord],
    out_dir: &Path,
) -> Result<()> {
    if records.is_empty() || summary.cells.is_empty() {
        return Err(CroError::NoRecords);
    }
    fs::create_dir_all(out_dir).map_err(|e| CroError::io(out_dir, e))?;

    write_file(&out_dir.join("summary.csv"), |w| {
        let algorithms = summary.algorithms();
        write!(w, "benchmark")?;
        for a in &algorithms {
            write!(w, ",{a}")?;
        }
        writeln!(w)?;
        for b in summary.benchmarks() {
            write!(w, "{b}")?;
            for &a in &algorithms {
                let cell = summary
                    .cell(a, b)
                    .map_or(String::new(), |c| format_sci(c.mean));
                write!(w, ",{cell}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;

    write_file(&out_dir.join("stats.csv"), |w| {
        writeln!(w, "algorithm,benchmark,runs,mean,median,std,min,max")?;
        for c in &summary.cells {
            writeln!(
                w,
                "{},{},{},{:e},{:e},{:e},{:e},{:e}",
                c.algorithm, c.benchmark, c.runs, c.mean, c.median, c.std, c.min, c.max
            )?;
        }
        Ok(())
    })?;

    write_file(&out_dir.join("records.jsonl"), |w| {
        for r in records {
            serde_json::to_writer(&mut *w, r)?;
            writeln!(w)?;
        }
        Ok(())
    })?;

    write_records_traces(&out_dir.join("traces.csv"), records)
}

/// Partial output after a failed experiment: just the finished records.
pub fn emit_partial(records: &[RunRecord], out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| CroError::io(out_dir, e))?;
    write_file(&out_dir.join("records.partial.jsonl"), |w| {
        for r in records {
            serde_json::to_writer(&mut *w, r)?;
            writeln!(w)?;
        }
        Ok(())
    })
}

fn write_records_traces(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "algorithm,benchmark,seed,checkpoint,fe,best")?;
        for r in records {
            for (k, p) in r.trace.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{:e}",
                    r.algorithm,
                    r.benchmark,
                    r.seed,
                    k + 1,
                    p.fe,
                    p.best
                )?;
            }
        }
        Ok(())
    })
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| CroError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|()| w.flush())
        .map_err(|e| CroError::io(path, e))
}
