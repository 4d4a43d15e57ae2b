//! Outer loops of the canonical (CRO/BP, CRO/HP, CRO/BB, CRO/D) and adaptive
//! (ACRO/BP, ACRO/HP, ACRO/BB) optimizers.

mod acro;
mod adaptive;
mod config;
mod cro;
mod step_size;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use acro::{acro_init, run_acro, AcroInit};
pub use adaptive::{
    draw_loss_rate, fold_loss_rate, population_feedback, select_reaction_acro, PopulationFeedback,
    LOSS_RATE_SIGMA,
};
pub use config::{
    AcroParams, AlgorithmConfig, CroParams, StepDecay, UpdatePolicy, Variant, VariantParams,
    DEFAULT_COLL_RATE, DEFAULT_MAX_FES, DEFAULT_POP_SIZE,
};
pub use cro::{cro_init, run_cro};
pub use step_size::{step_size_rule, StepVerdict, SuccessWindow, ADAPTATION_FACTOR};

use crate::error::{CroError, Result};
use crate::reactions::{ReactionKind, ReactionOutcome};
use crate::reactor::{relative_gap, Molecule, Objective, ReactorState, Solution, ENERGY_TOLERANCE};

/// Number of evenly spaced checkpoints recorded per run.
pub const TRACE_CHECKPOINTS: u64 = 100;

/// Best-so-far value when the evaluation counter first reached `fe`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub fe: u64,
    pub best: f64,
}

/// Attempts and successes per reaction kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionCounts {
    pub attempts: [u64; 4],
    pub successes: [u64; 4],
}

impl ReactionCounts {
    fn slot(kind: ReactionKind) -> usize {
        ReactionKind::ALL.iter().position(|k| *k == kind).unwrap()
    }

    fn record(&mut self, outcome: &ReactionOutcome) {
        let i = Self::slot(outcome.kind);
        self.attempts[i] += 1;
        self.successes[i] += u64::from(outcome.success);
    }

    pub fn attempts(&self, kind: ReactionKind) -> u64 {
        self.attempts[Self::slot(kind)]
    }

    pub fn successes(&self, kind: ReactionKind) -> u64 {
        self.successes[Self::slot(kind)]
    }
}

/// What a finished run reports.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub variant: Variant,
    pub best_pe: f64,
    pub best_solution: Solution,
    pub fe_count: u64,
    /// `TRACE_CHECKPOINTS` points, one per percent of the budget.
    pub trace: Vec<TracePoint>,
    pub final_step_size: Vec<f64>,
    pub final_population: usize,
    pub reactions: ReactionCounts,
}

/// Hooks invoked while a run progresses.
pub trait RunObserver {
    fn on_init(&mut self, _state: &ReactorState) {}

    /// Called after every reaction, once the best record and step size have
    /// been updated.
    fn on_reaction(&mut self, _state: &ReactorState, _outcome: &ReactionOutcome) {}
}

impl RunObserver for () {}

/// Runs whichever optimizer `cfg.variant` names.
pub fn run<R: Rng + ?Sized>(
    objective: &dyn Objective,
    cfg: &AlgorithmConfig,
    rng: &mut R,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    if cfg.variant.is_adaptive() {
        run_acro(objective, cfg, rng, observer)
    } else {
        run_cro(objective, cfg, rng, observer)
    }
}

struct TraceRecorder {
    max_fes: u64,
    next: u64,
    points: Vec<TracePoint>,
}

impl TraceRecorder {
    fn new(max_fes: u64) -> Self {
        TraceRecorder {
            max_fes,
            next: 1,
            points: Vec::with_capacity(TRACE_CHECKPOINTS as usize),
        }
    }

    fn checkpoint(&self, k: u64) -> u64 {
        (k * self.max_fes).div_ceil(TRACE_CHECKPOINTS)
    }

    fn observe(&mut self, fe_count: u64, best: f64) {
        while self.next <= TRACE_CHECKPOINTS && fe_count >= self.checkpoint(self.next) {
            self.points.push(TracePoint {
                fe: self.checkpoint(self.next),
                best,
            });
            self.next += 1;
        }
    }

    fn finish(self) -> Vec<TracePoint> {
        debug_assert_eq!(self.points.len() as u64, TRACE_CHECKPOINTS);
        self.points
    }
}

/// Periodic whole-reactor conservation check.
struct Ledger {
    expected: f64,
    interval: u64,
    reactions: u64,
}

impl Ledger {
    fn new(state: &ReactorState, interval: u64) -> Self {
        Ledger {
            expected: state.total_energy(),
            interval,
            reactions: 0,
        }
    }

    fn tick(&mut self, state: &ReactorState) -> Result<()> {
        self.reactions += 1;
        if self.interval == 0 || !self.reactions.is_multiple_of(self.interval) {
            return Ok(());
        }
        let actual = state.total_energy();
        if relative_gap(self.expected, actual) > ENERGY_TOLERANCE {
            return Err(CroError::EnergyLedger {
                expected: self.expected,
                actual,
            });
        }
        Ok(())
    }
}

/// Shared bookkeeping for both loops.
struct RunLoop {
    trace: TraceRecorder,
    ledger: Ledger,
    reactions: ReactionCounts,
}

impl RunLoop {
    fn start(state: &ReactorState, cfg: &AlgorithmConfig, observer: &mut dyn RunObserver) -> Self {
        observer.on_init(state);
        let mut trace = TraceRecorder::new(cfg.max_fes);
        trace.observe(state.fe_count, state.best_pe);
        RunLoop {
            trace,
            ledger: Ledger::new(state, cfg.ledger_check_interval),
            reactions: ReactionCounts::default(),
        }
    }

    /// Offers the reaction's structures to the best record. With a policy
    /// (adaptive runs) every offer is an update of the success rule.
    fn after_reaction(
        &mut self,
        state: &mut ReactorState,
        outcome: &ReactionOutcome,
        policy: Option<UpdatePolicy>,
        observer: &mut dyn RunObserver,
    ) -> Result<()> {
        self.reactions.record(outcome);
        for (s, pe) in &outcome.new_structures {
            state.update_best(s, *pe);
            if policy.is_some() {
                step_size_rule(state);
            }
        }
        if policy == Some(UpdatePolicy::EvaluatedCandidates) {
            for (s, pe) in &outcome.rejected {
                state.update_best(s, *pe);
                step_size_rule(state);
            }
        }
        self.ledger.tick(state)?;
        self.trace.observe(state.fe_count, state.best_pe);
        observer.on_reaction(state, outcome);
        Ok(())
    }

    fn finish(self, variant: Variant, state: ReactorState) -> RunOutcome {
        RunOutcome {
            variant,
            best_pe: state.best_pe,
            best_solution: state.best_solution,
            fe_count: state.fe_count,
            trace: self.trace.finish(),
            final_step_size: state.step_size,
            final_population: state.population.len(),
            reactions: self.reactions,
        }
    }
}

/// Evaluates `size` uniformly random in-bounds structures.
fn random_population<R: Rng + ?Sized>(
    state: &mut ReactorState,
    objective: &dyn Objective,
    size: usize,
    rng: &mut R,
) -> Result<Vec<(Solution, f64)>> {
    let bounds = objective.bounds();
    let mut out = Vec::with_capacity(size);
    for _ in 0..size {
        let values: Vec<f64> = (0..bounds.dimension())
            .map(|i| {
                let (lo, hi) = bounds.interval(i);
                lo + (hi - lo) * rng.random::<f64>()
            })
            .collect();
        let s = Solution::new(values);
        let pe = state.evaluate_and_count(objective, &s)?;
        out.push((s, pe));
    }
    Ok(out)
}

fn pick_one<R: Rng + ?Sized>(population: &[Molecule], rng: &mut R) -> usize {
    rng.random_range(0..population.len())
}

/// Two distinct indices; requires at least two molecules.
fn pick_two<R: Rng + ?Sized>(population: &[Molecule], rng: &mut R) -> (usize, usize) {
    let n = population.len();
    debug_assert!(n >= 2);
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}
