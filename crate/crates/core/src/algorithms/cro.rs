use rand::Rng;

use super::{
    pick_one, pick_two, random_population, AlgorithmConfig, RunLoop, RunObserver, RunOutcome,
    SuccessWindow,
};
use crate::error::{CroError, Result};
use crate::reactions::{react, LossRatePolicy, ReactionContext, ReactionKind};
use crate::reactor::{Molecule, Objective, ReactorState};

/// Builds the initial reactor of a canonical variant: every molecule gets
/// `ini_ke`, the buffer gets `ini_buffer` and the scalar step size is
/// broadcast to every dimension.
pub fn cro_init<R: Rng + ?Sized>(
    objective: &dyn Objective,
    cfg: &AlgorithmConfig,
    rng: &mut R,
) -> Result<ReactorState> {
    cfg.validate()?;
    let p = cfg.canonical().ok_or_else(|| {
        CroError::InvalidConfig(format!("{} is not a canonical variant", cfg.variant))
    })?;
    let d = objective.dimension();
    let mut state = ReactorState::new(
        d,
        cfg.max_fes,
        vec![p.step_size; d],
        SuccessWindow::n_for_budget(cfg.max_fes),
    );
    let structures = random_population(&mut state, objective, cfg.ini_pop_size, rng)?;
    state.population = structures
        .into_iter()
        .map(|(s, pe)| Molecule::new(s, pe, p.ini_ke, p.loss_rate))
        .collect();
    state.buffer = p.ini_buffer;
    state.refresh_best_from_population();
    Ok(state)
}

/// Runs a canonical optimizer until the evaluation budget is spent.
///
/// Two-molecule reactions are picked with probability `coll_rate`; they are
/// syntheses when both reactants hold less kinetic energy than `syn_thres`.
/// One-molecule reactions are decompositions once the molecule has gone
/// more than `dec_thres` collisions without improving its own best.
pub fn run_cro<R: Rng + ?Sized>(
    objective: &dyn Objective,
    cfg: &AlgorithmConfig,
    rng: &mut R,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    let mut state = cro_init(objective, cfg, rng)?;
    let p = cfg.canonical().expect("validated canonical config").clone();
    let ctx = ReactionContext {
        objective,
        boundary: cfg.variant.boundary_rule(),
        synthesis: cfg.variant.synthesis_rule(),
        loss_rate: LossRatePolicy::Global(p.loss_rate),
    };
    let mut run = RunLoop::start(&state, cfg, observer);
    let mut decays_applied = 0u64;

    while state.fe_count < cfg.max_fes {
        let (mut kind, i, j) = if rng.random::<f64>() < cfg.coll_rate && state.population.len() >= 2
        {
            let (i, j) = pick_two(&state.population, rng);
            let (a, b) = (&state.population[i], &state.population[j]);
            if a.ke < p.syn_thres && b.ke < p.syn_thres {
                (ReactionKind::Synthesis, i, j)
            } else {
                (ReactionKind::InterMolecular, i, j)
            }
        } else {
            let i = pick_one(&state.population, rng);
            if state.population[i].inactive_degree() as f64 > p.dec_thres {
                (ReactionKind::Decomposition, i, i)
            } else {
                (ReactionKind::OnWall, i, i)
            }
        };
        if kind.evaluations() > state.remaining_evaluations() {
            kind = ReactionKind::OnWall;
        }
        let outcome = react(kind, &mut state, &ctx, i, j, rng)?;

        if let Some(decay) = p.decay {
            let due = state.fe_count / decay.interval;
            while decays_applied < due {
                for s in &mut state.step_size {
                    *s *= decay.rate;
                }
                decays_applied += 1;
            }
        }
        run.after_reaction(&mut state, &outcome, None, observer)?;
    }
    Ok(run.finish(cfg.variant, state))
}
