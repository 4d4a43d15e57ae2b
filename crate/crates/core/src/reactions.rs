//! The four elementary reactions with their energy bookkeeping.
//!
//! | | one molecule | two molecules |
//! |---|---|---|
//! | constant population | on-wall ineffective collision | inter-molecular ineffective collision |
//! | variable population | decomposition | synthesis |
//!
//! Every reaction charges its trial evaluations to the budget whether or not
//! it succeeds. A failed reaction only advances `num_hit` (and `fe_count`);
//! structures, kinetic energies and the buffer are left untouched.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::draw_loss_rate;
use crate::error::{CroError, Result};
use crate::operators::{
    decompose_structure, neighborhood_search, synthesize_structure, BoundaryRule, SynthesisRule,
};
use crate::reactor::{Molecule, Objective, ReactorState, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReactionKind {
    OnWall,
    Decomposition,
    InterMolecular,
    Synthesis,
}

impl ReactionKind {
    pub const ALL: [ReactionKind; 4] = [
        ReactionKind::OnWall,
        ReactionKind::Decomposition,
        ReactionKind::InterMolecular,
        ReactionKind::Synthesis,
    ];

    /// Objective evaluations consumed by one attempt.
    pub fn evaluations(self) -> u64 {
        match self {
            ReactionKind::OnWall | ReactionKind::Synthesis => 1,
            ReactionKind::Decomposition | ReactionKind::InterMolecular => 2,
        }
    }

    pub fn reactants(self) -> usize {
        match self {
            ReactionKind::OnWall | ReactionKind::Decomposition => 1,
            ReactionKind::InterMolecular | ReactionKind::Synthesis => 2,
        }
    }
}

impl fmt::Display for ReactionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReactionKind::OnWall => "on-wall",
            ReactionKind::Decomposition => "decomposition",
            ReactionKind::InterMolecular => "inter-molecular",
            ReactionKind::Synthesis => "synthesis",
        })
    }
}

/// Result of one reaction attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct ReactionOutcome {
    pub kind: ReactionKind,
    pub success: bool,
    /// Structures produced by a successful reaction, with their PE.
    pub new_structures: Vec<(Solution, f64)>,
    /// Candidates evaluated by a failed reaction and thrown away.
    pub rejected: Vec<(Solution, f64)>,
    pub population_delta: i32,
}

impl ReactionOutcome {
    fn failed(kind: ReactionKind, rejected: Vec<(Solution, f64)>) -> Self {
        ReactionOutcome {
            kind,
            success: false,
            new_structures: Vec::new(),
            rejected,
            population_delta: 0,
        }
    }

    fn adopted(kind: ReactionKind, new_structures: Vec<(Solution, f64)>, delta: i32) -> Self {
        ReactionOutcome {
            kind,
            success: true,
            new_structures,
            rejected: Vec::new(),
            population_delta: delta,
        }
    }
}

/// Loss rate given to molecules created mid-run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossRatePolicy {
    /// One global value shared by every molecule.
    Global(f64),
    /// A fresh folded-normal draw per molecule.
    PerMolecule,
}

impl LossRatePolicy {
    pub fn assign<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            LossRatePolicy::Global(rate) => rate,
            LossRatePolicy::PerMolecule => draw_loss_rate(rng),
        }
    }
}

/// Problem and variant settings a reaction needs besides the reactor state.
#[derive(Clone, Copy)]
pub struct ReactionContext<'a> {
    pub objective: &'a dyn Objective,
    pub boundary: BoundaryRule,
    pub synthesis: SynthesisRule,
    pub loss_rate: LossRatePolicy,
}

/// Kinetic energy kept by the molecule and energy sent to the buffer after a
/// successful on-wall collision; `None` when the move is not affordable.
///
/// `retained` is the fraction `q` drawn from `[loss_rate, 1]`.
pub fn on_wall_energy(pe: f64, ke: f64, pe_new: f64, retained: f64) -> Option<(f64, f64)> {
    if pe + ke < pe_new {
        return None;
    }
    let excess = pe + ke - pe_new;
    let ke_new = excess * retained;
    Some((ke_new, excess - ke_new))
}

/// Surplus available to two decomposition children and the amount drawn
/// from the buffer, given the buffer-share factor `d1 * d2`. `None` on failure.
pub fn decomposition_energy(
    pe: f64,
    ke: f64,
    pe1: f64,
    pe2: f64,
    buffer: f64,
    buffer_share: impl FnOnce() -> f64,
) -> Option<(f64, f64)> {
    let own = pe + ke - pe1 - pe2;
    if own >= 0.0 {
        return Some((own, 0.0));
    }
    let drawn = buffer_share() * buffer;
    let surplus = own + drawn;
    (surplus >= 0.0).then_some((surplus, drawn))
}

fn check_index(state: &ReactorState, i: usize) {
    assert!(
        i < state.population.len(),
        "molecule index {i} out of range (population {})",
        state.population.len()
    );
}

fn check_pair(state: &ReactorState, i: usize, j: usize) -> Result<()> {
    check_index(state, i);
    check_index(state, j);
    if i == j {
        return Err(CroError::SameMolecule(i));
    }
    Ok(())
}

/// One molecule hits the wall and moves to a neighbouring structure.
pub fn on_wall_collision<R: Rng + ?Sized>(
    state: &mut ReactorState,
    ctx: &ReactionContext<'_>,
    i: usize,
    rng: &mut R,
) -> Result<ReactionOutcome> {
    check_index(state, i);
    state.reserve(1)?;
    let bounds = ctx.objective.bounds();
    let candidate = neighborhood_search(
        &state.population[i].structure,
        &state.step_size,
        bounds,
        ctx.boundary,
        rng,
    );
    let pe_new = state.evaluate_and_count(ctx.objective, &candidate)?;

    let m = &mut state.population[i];
    m.num_hit += 1;
    if m.pe + m.ke < pe_new {
        return Ok(ReactionOutcome::failed(
            ReactionKind::OnWall,
            vec![(candidate, pe_new)],
        ));
    }
    let retained = rng.random_range(m.loss_rate..=1.0);
    let (ke_new, to_buffer) =
        on_wall_energy(m.pe, m.ke, pe_new, retained).expect("affordability checked above");
    m.relocate(candidate.clone(), pe_new, ke_new);
    state.buffer += to_buffer;
    Ok(ReactionOutcome::adopted(
        ReactionKind::OnWall,
        vec![(candidate, pe_new)],
        0,
    ))
}

/// One molecule splits into two, borrowing from the buffer if its own energy
/// does not cover the children.
pub fn decomposition<R: Rng + ?Sized>(
    state: &mut ReactorState,
    ctx: &ReactionContext<'_>,
    i: usize,
    rng: &mut R,
) -> Result<ReactionOutcome> {
    check_index(state, i);
    state.reserve(2)?;
    let bounds = ctx.objective.bounds();
    let (c1, c2) = decompose_structure(
        &state.population[i].structure,
        &state.step_size,
        bounds,
        ctx.boundary,
        rng,
    );
    let pe1 = state.evaluate_and_count(ctx.objective, &c1)?;
    let pe2 = state.evaluate_and_count(ctx.objective, &c2)?;

    let parent = &mut state.population[i];
    parent.num_hit += 1;
    let Some((surplus, drawn)) =
        decomposition_energy(parent.pe, parent.ke, pe1, pe2, state.buffer, || {
            rng.random::<f64>() * rng.random::<f64>()
        })
    else {
        return Ok(ReactionOutcome::failed(
            ReactionKind::Decomposition,
            vec![(c1, pe1), (c2, pe2)],
        ));
    };
    state.buffer -= drawn;
    let split = rng.random::<f64>();
    let ke1 = surplus * split;
    let ke2 = surplus - ke1;
    let lr1 = ctx.loss_rate.assign(rng);
    let lr2 = ctx.loss_rate.assign(rng);
    state.population[i] = Molecule::new(c1.clone(), pe1, ke1, lr1);
    state
        .population
        .push(Molecule::new(c2.clone(), pe2, ke2, lr2));
    Ok(ReactionOutcome::adopted(
        ReactionKind::Decomposition,
        vec![(c1, pe1), (c2, pe2)],
        1,
    ))
}

/// Two molecules collide and both move to neighbouring structures, sharing
/// their combined surplus.
pub fn intermolecular_collision<R: Rng + ?Sized>(
    state: &mut ReactorState,
    ctx: &ReactionContext<'_>,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<ReactionOutcome> {
    check_pair(state, i, j)?;
    state.reserve(2)?;
    let bounds = ctx.objective.bounds();
    let n1 = neighborhood_search(
        &state.population[i].structure,
        &state.step_size,
        bounds,
        ctx.boundary,
        rng,
    );
    let n2 = neighborhood_search(
        &state.population[j].structure,
        &state.step_size,
        bounds,
        ctx.boundary,
        rng,
    );
    let pe1 = state.evaluate_and_count(ctx.objective, &n1)?;
    let pe2 = state.evaluate_and_count(ctx.objective, &n2)?;

    state.population[i].num_hit += 1;
    state.population[j].num_hit += 1;
    let (a, b) = (&state.population[i], &state.population[j]);
    let surplus = a.energy() + b.energy() - pe1 - pe2;
    if surplus < 0.0 {
        return Ok(ReactionOutcome::failed(
            ReactionKind::InterMolecular,
            vec![(n1, pe1), (n2, pe2)],
        ));
    }
    let split = rng.random::<f64>();
    let ke1 = surplus * split;
    let ke2 = surplus - ke1;
    state.population[i].relocate(n1.clone(), pe1, ke1);
    state.population[j].relocate(n2.clone(), pe2, ke2);
    Ok(ReactionOutcome::adopted(
        ReactionKind::InterMolecular,
        vec![(n1, pe1), (n2, pe2)],
        0,
    ))
}

/// Two molecules fuse into one that keeps their entire surplus as KE.
pub fn synthesis<R: Rng + ?Sized>(
    state: &mut ReactorState,
    ctx: &ReactionContext<'_>,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<ReactionOutcome> {
    if state.population.len() < 2 {
        return Err(CroError::PopulationTooSmall(state.population.len()));
    }
    check_pair(state, i, j)?;
    state.reserve(1)?;
    let child = synthesize_structure(
        &state.population[i].structure,
        &state.population[j].structure,
        ctx.synthesis,
        ctx.objective.bounds(),
        ctx.boundary,
        rng,
    )?;
    let pe = state.evaluate_and_count(ctx.objective, &child)?;

    state.population[i].num_hit += 1;
    state.population[j].num_hit += 1;
    let surplus = state.population[i].energy() + state.population[j].energy() - pe;
    if surplus < 0.0 {
        return Ok(ReactionOutcome::failed(
            ReactionKind::Synthesis,
            vec![(child, pe)],
        ));
    }
    let loss_rate = ctx.loss_rate.assign(rng);
    // Remove the higher index first so the lower one stays valid.
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    state.population.swap_remove(hi);
    state.population[lo] = Molecule::new(child.clone(), pe, surplus, loss_rate);
    Ok(ReactionOutcome::adopted(
        ReactionKind::Synthesis,
        vec![(child, pe)],
        -1,
    ))
}

/// Dispatches a reaction of `kind` on molecule `i` (and `j` for two-molecule
/// reactions).
pub fn react<R: Rng + ?Sized>(
    kind: ReactionKind,
    state: &mut ReactorState,
    ctx: &ReactionContext<'_>,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<ReactionOutcome> {
    match kind {
        ReactionKind::OnWall => on_wall_collision(state, ctx, i, rng),
        ReactionKind::Decomposition => decomposition(state, ctx, i, rng),
        ReactionKind::InterMolecular => intermolecular_collision(state, ctx, i, j, rng),
        ReactionKind::Synthesis => synthesis(state, ctx, i, j, rng),
    }
}
