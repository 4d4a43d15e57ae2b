//! Success-rate driven step-size control.

use std::collections::VecDeque;

use crate::reactor::ReactorState;

/// Multiplicative step-size factor of the success rule.
pub const ADAPTATION_FACTOR: f64 = 0.85;

/// Sliding record of the last `10n` update outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessWindow {
    n: u64,
    outcomes: VecDeque<bool>,
    successes: u64,
    updates_seen: u64,
}

/// Direction chosen at a window checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepVerdict {
    Expand,
    Shrink,
}

impl StepVerdict {
    pub fn apply(self, step: f64) -> f64 {
        match self {
            StepVerdict::Expand => step / ADAPTATION_FACTOR,
            StepVerdict::Shrink => step * ADAPTATION_FACTOR,
        }
    }
}

impl SuccessWindow {
    /// A window checked every `n` updates over the last `10n`. `n` is clamped
    /// to at least 1.
    pub fn new(n: u64) -> Self {
        let n = n.max(1);
        SuccessWindow {
            n,
            outcomes: VecDeque::with_capacity(Self::capacity_for(n)),
            successes: 0,
            updates_seen: 0,
        }
    }

    /// `n` for a given evaluation budget: one hundredth of it.
    pub fn n_for_budget(max_fes: u64) -> u64 {
        (max_fes / 100).max(1)
    }

    fn capacity_for(n: u64) -> usize {
        (10 * n) as usize
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn capacity(&self) -> usize {
        Self::capacity_for(self.n)
    }

    pub fn record(&mut self, success: bool) {
        if self.outcomes.len() == self.capacity() && self.outcomes.pop_front() == Some(true) {
            self.successes -= 1;
        }
        self.outcomes.push_back(success);
        self.successes += u64::from(success);
        self.updates_seen += 1;
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn updates_seen(&self) -> u64 {
        self.updates_seen
    }

    pub fn is_full(&self) -> bool {
        self.outcomes.len() == self.capacity()
    }

    /// The rule's decision if the latest update landed on a checkpoint with a
    /// full history; `None` otherwise.
    pub fn verdict(&self) -> Option<StepVerdict> {
        if self.updates_seen == 0 || !self.updates_seen.is_multiple_of(self.n) || !self.is_full() {
            return None;
        }
        Some(if self.successes > 2 * self.n {
            StepVerdict::Expand
        } else {
            StepVerdict::Shrink
        })
    }
}

/// Applies the success rule to every step-size component. Call once after
/// each [`ReactorState::update_best`].
pub fn step_size_rule(state: &mut ReactorState) -> Option<StepVerdict> {
    let verdict = state.update_window.verdict()?;
    for s in &mut state.step_size {
        *s = verdict.apply(*s);
    }
    Some(verdict)
}
