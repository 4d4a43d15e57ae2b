use rand::Rng;

use super::{
    draw_loss_rate, pick_one, pick_two, random_population, select_reaction_acro, AlgorithmConfig,
    RunLoop, RunObserver, RunOutcome, SuccessWindow,
};
use crate::error::{CroError, Result};
use crate::reactions::{react, LossRatePolicy, ReactionContext, ReactionKind};
use crate::reactor::{Molecule, Objective, ReactorState};

/// An initialized adaptive reactor plus the kinetic energy every initial
/// molecule received.
#[derive(Clone, Debug)]
pub struct AcroInit {
    pub state: ReactorState,
    pub ini_ke: f64,
}

/// Builds the initial reactor of the adaptive variant.
///
/// Every molecule starts with `(max PE - min PE) * ini_pop_size` of kinetic
/// energy, the buffer starts empty, the step size is half the box width per
/// dimension and each molecule draws its own loss rate.
pub fn acro_init<R: Rng + ?Sized>(
    objective: &dyn Objective,
    cfg: &AlgorithmConfig,
    rng: &mut R,
) -> Result<AcroInit> {
    cfg.validate()?;
    if !cfg.variant.is_adaptive() {
        return Err(CroError::InvalidConfig(format!(
            "{} is not an adaptive variant",
            cfg.variant
        )));
    }
    let bounds = objective.bounds();
    let step_size = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| (hi - lo) / 2.0)
        .collect();
    let mut state = ReactorState::new(
        bounds.dimension(),
        cfg.max_fes,
        step_size,
        SuccessWindow::n_for_budget(cfg.max_fes),
    );
    let structures = random_population(&mut state, objective, cfg.ini_pop_size, rng)?;
    let (lowest, highest) = structures
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, pe)| {
            (lo.min(*pe), hi.max(*pe))
        });
    let ini_ke = (highest - lowest) * cfg.ini_pop_size as f64;
    state.population = structures
        .into_iter()
        .map(|(s, pe)| Molecule::new(s, pe, ini_ke, draw_loss_rate(rng)))
        .collect();
    state.buffer = 0.0;
    state.refresh_best_from_population();
    Ok(AcroInit { state, ini_ke })
}

/// Runs the adaptive optimizer until the evaluation budget is spent.
pub fn run_acro<R: Rng + ?Sized>(
    objective: &dyn Objective,
    cfg: &AlgorithmConfig,
    rng: &mut R,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    let AcroInit { mut state, .. } = acro_init(objective, cfg, rng)?;
    let change_rate = cfg
        .adaptive()
        .expect("validated adaptive config")
        .change_rate;
    let update_policy = cfg
        .adaptive()
        .expect("validated adaptive config")
        .update_policy;
    let ctx = ReactionContext {
        objective,
        boundary: cfg.variant.boundary_rule(),
        synthesis: cfg.variant.synthesis_rule(),
        loss_rate: LossRatePolicy::PerMolecule,
    };
    let mut run = RunLoop::start(&state, cfg, observer);

    while state.fe_count < cfg.max_fes {
        let mut kind = select_reaction_acro(
            state.population.len(),
            cfg.ini_pop_size,
            cfg.coll_rate,
            change_rate,
            rng,
        );
        if kind.evaluations() > state.remaining_evaluations() {
            kind = ReactionKind::OnWall;
        }
        let (i, j) = if kind.reactants() == 2 {
            pick_two(&state.population, rng)
        } else {
            let i = pick_one(&state.population, rng);
            (i, i)
        };
        let outcome = react(kind, &mut state, &ctx, i, j, rng)?;
        run.after_reaction(&mut state, &outcome, Some(update_policy), observer)?;
    }
    Ok(run.finish(cfg.variant, state))
}
