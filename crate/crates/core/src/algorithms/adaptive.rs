//! Parameter schemes of the adaptive variant: per-molecule loss rates and the
//! population-feedback reaction selector.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::reactions::ReactionKind;

/// Standard deviation of the normal distribution behind the loss rate.
pub const LOSS_RATE_SIGMA: f64 = 0.3;

/// Folds a raw normal draw into a loss rate: absolute value, capped at 1.
pub fn fold_loss_rate(raw: f64) -> f64 {
    raw.abs().min(1.0)
}

/// A loss rate from the folded normal `|N(0, 0.3^2)|` capped at 1.
pub fn draw_loss_rate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    fold_loss_rate(rng.sample::<f64, _>(StandardNormal) * LOSS_RATE_SIGMA)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationFeedback {
    /// Relative deviation of the population from its initial size.
    pub pop: f64,
    /// Probability weight of decomposition in the variable-population branch.
    pub dec: f64,
    /// Probability weight of synthesis; always `1 - dec`.
    pub syn: f64,
}

pub fn population_feedback(cur_pop_size: usize, ini_pop_size: usize) -> PopulationFeedback {
    let ini = ini_pop_size as f64;
    let pop = (cur_pop_size as f64 - ini) / ini;
    let dec = 0.5 * (1.0 - pop);
    PopulationFeedback {
        pop,
        dec,
        syn: 1.0 - dec,
    }
}

/// Chooses the next reaction: a variable-population reaction with
/// probability `change_rate` (decomposition vs synthesis weighted by the
/// population feedback), otherwise an inter-molecular collision with
/// probability `coll_rate` or an on-wall collision.
pub fn select_reaction_acro<R: Rng + ?Sized>(
    cur_pop_size: usize,
    ini_pop_size: usize,
    coll_rate: f64,
    change_rate: f64,
    rng: &mut R,
) -> ReactionKind {
    if rng.random::<f64>() < change_rate {
        if cur_pop_size < 2 {
            return ReactionKind::Decomposition;
        }
        let fb = population_feedback(cur_pop_size, ini_pop_size);
        if rng.random::<f64>() < fb.dec {
            ReactionKind::Decomposition
        } else {
            ReactionKind::Synthesis
        }
    } else if rng.random::<f64>() < coll_rate && cur_pop_size >= 2 {
        ReactionKind::InterMolecular
    } else {
        ReactionKind::OnWall
    }
}
