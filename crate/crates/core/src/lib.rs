//! Chemical Reaction Optimization (CRO) and its adaptive variant (ACRO), with
//! a 24-function benchmark suite and an experiment harness.
//!
//! ```
//! use acro_core::{run, AlgorithmConfig, BenchmarkId, BenchmarkInstance, Variant};
//! use rand::SeedableRng;
//!
//! let f1 = BenchmarkInstance::generate(BenchmarkId::new(1).unwrap(), 10, 2013);
//! let cfg = AlgorithmConfig::defaults(Variant::AcroBp, 5_000);
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let outcome = run(&f1, &cfg, &mut rng, &mut ()).unwrap();
//! assert_eq!(outcome.fe_count, 5_000);
//! ```

pub mod algorithms;
pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod operators;
pub mod reactions;
pub mod reactor;

pub use algorithms::{run, AlgorithmConfig, RunObserver, RunOutcome, TracePoint, Variant};
pub use benchmarks::{BenchmarkId, BenchmarkInstance, TransformData};
pub use error::{CroError, Result};
pub use harness::{
    emit_results, run_experiment, summarize, Experiment, ExperimentConfig, ExperimentSummary,
    RunRecord,
};
pub use reactions::{ReactionKind, ReactionOutcome};
pub use reactor::{Bounds, FnObjective, Molecule, Objective, ReactorState, Solution};
