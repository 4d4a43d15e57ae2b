//! Molecules, the search box, objectives and the reactor state shared by every
//! optimizer variant.
//!
//! The reactor is a closed system: the potential and kinetic energy of all
//! molecules plus the central buffer stay constant across any successful
//! elementary reaction. [`ReactorState::total_energy`] is the ledger used to
//! verify that.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::algorithms::SuccessWindow;
use crate::error::{CroError, Result};

/// A candidate solution: one real value per decision variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution(Vec<f64>);

impl Solution {
    pub fn new(values: Vec<f64>) -> Self {
        Solution(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Solution {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Solution {
    fn from(values: Vec<f64>) -> Self {
        Solution(values)
    }
}

/// Box constraints `lower[i] <= x[i] <= upper[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(CroError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(CroError::InvalidConfig(
                "bounds must have dimension >= 1".into(),
            ));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CroError::InvalidConfig(format!(
                    "bound {i} is not a finite interval with lower < upper: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The same interval in every dimension.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.lower[i], self.upper[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

/// A box-constrained minimization problem.
pub trait Objective: Sync {
    fn bounds(&self) -> &Bounds;

    /// Objective value at `x`. Must be pure and finite for in-bounds points.
    fn evaluate(&self, x: &[f64]) -> f64;

    fn dimension(&self) -> usize {
        self.bounds().dimension()
    }
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    bounds: Bounds,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(bounds: Bounds, f: F) -> Self {
        FnObjective { bounds, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// The search agent: a solution plus its energies and collision history.
#[derive(Clone, Debug, PartialEq)]
pub struct Molecule {
    pub structure: Solution,
    /// Potential energy, i.e. the objective value of `structure`.
    pub pe: f64,
    /// Kinetic energy: tolerance for accepting a worse structure.
    pub ke: f64,
    pub num_hit: u64,
    /// `num_hit` at the time `min_pe` was last improved.
    pub min_hit: u64,
    pub min_pe: f64,
    pub loss_rate: f64,
}

impl Molecule {
    /// A freshly created molecule with zeroed collision counters.
    pub fn new(structure: Solution, pe: f64, ke: f64, loss_rate: f64) -> Self {
        Molecule {
            structure,
            pe,
            ke,
            num_hit: 0,
            min_hit: 0,
            min_pe: pe,
            loss_rate,
        }
    }

    /// Collisions since the molecule last improved its own best.
    pub fn inactive_degree(&self) -> u64 {
        self.num_hit - self.min_hit
    }

    /// Moves the molecule to a new structure and refreshes its own-best record.
    pub fn relocate(&mut self, structure: Solution, pe: f64, ke: f64) {
        debug_assert!(ke >= 0.0, "negative kinetic energy {ke}");
        self.structure = structure;
        self.pe = pe;
        self.ke = ke;
        if pe < self.min_pe {
            self.min_pe = pe;
            self.min_hit = self.num_hit;
        }
    }

    pub fn energy(&self) -> f64 {
        self.pe + self.ke
    }
}

/// Everything a single optimizer run mutates.
#[derive(Clone, Debug)]
pub struct ReactorState {
    pub population: Vec<Molecule>,
    pub buffer: f64,
    pub fe_count: u64,
    pub max_fes: u64,
    pub best_pe: f64,
    pub best_solution: Solution,
    /// Standard deviation of the Gaussian perturbation, per dimension.
    pub step_size: Vec<f64>,
    pub update_window: SuccessWindow,
}

impl ReactorState {
    /// An empty reactor with the given evaluation budget. `window_n` sizes the
    /// success window (`10 * window_n` outcomes).
    pub fn new(dimension: usize, max_fes: u64, step_size: Vec<f64>, window_n: u64) -> Self {
        ReactorState {
            population: Vec::new(),
            buffer: 0.0,
            fe_count: 0,
            max_fes,
            best_pe: f64::INFINITY,
            best_solution: Solution::new(vec![0.0; dimension]),
            step_size,
            update_window: SuccessWindow::new(window_n),
        }
    }

    pub fn remaining_evaluations(&self) -> u64 {
        self.max_fes.saturating_sub(self.fe_count)
    }

    /// Fails unless `needed` more evaluations fit in the budget.
    pub fn reserve(&self, needed: u64) -> Result<()> {
        let remaining = self.remaining_evaluations();
        if needed > remaining {
            return Err(CroError::BudgetExhausted { needed, remaining });
        }
        Ok(())
    }

    /// Evaluates `s` and charges one evaluation to the budget.
    pub fn evaluate_and_count(&mut self, objective: &dyn Objective, s: &[f64]) -> Result<f64> {
        self.reserve(1)?;
        let value = objective.evaluate(s);
        self.fe_count += 1;
        if !value.is_finite() {
            return Err(CroError::NonFiniteObjective {
                value,
                evaluation: self.fe_count,
            });
        }
        Ok(value)
    }

    /// Buffer plus the potential and kinetic energy of every molecule.
    pub fn total_energy(&self) -> f64 {
        self.buffer + self.population.iter().map(Molecule::energy).sum::<f64>()
    }

    /// Offers a newly generated structure to the best-so-far record.
    ///
    /// Only a strict improvement counts as a success. The outcome is recorded
    /// in the success window either way.
    pub fn update_best(&mut self, candidate: &Solution, pe: f64) -> bool {
        let success = pe < self.best_pe;
        if success {
            self.best_pe = pe;
            self.best_solution.clone_from(candidate);
        }
        self.update_window.record(success);
        success
    }

    /// Seeds the best record from the population without touching the
    /// success window (used right after initialization).
    pub(crate) fn refresh_best_from_population(&mut self) {
        if let Some(m) = self
            .population
            .iter()
            .filter(|m| m.pe < self.best_pe)
            .min_by(|a, b| a.pe.total_cmp(&b.pe))
        {
            self.best_pe = m.pe;
            self.best_solution = m.structure.clone();
        }
    }

    pub fn update_count(&self) -> u64 {
        self.update_window.updates_seen()
    }
}

/// Relative difference used by the energy ledger checks.
pub fn relative_gap(before: f64, after: f64) -> f64 {
    let scale = before.abs().max(after.abs()).max(f64::MIN_POSITIVE);
    (before - after).abs() / scale
}

/// Relative tolerance for energy conservation across one reaction or a run.
pub const ENERGY_TOLERANCE: f64 = 1e-9;
