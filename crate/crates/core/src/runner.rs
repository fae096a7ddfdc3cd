//! Drives a solver over a problem stream and collects oracle solutions.

use alloc::vec::Vec;

use crate::solvers::{batch_solve_with, saddle_solve, BatchOptions, BatchOracleResult, OnlineSolver};
use crate::{GradientNoiseModel, IterateTrace, Result, TimeGrid, TimeVaryingProblem};

/// Runs `solver` over every slice of `problem`. The random state is seeded from
/// the noise model; `clock` (seconds, monotone) stamps each record's wall time.
pub fn run_online(
    problem: &dyn TimeVaryingProblem,
    solver: &mut dyn OnlineSolver,
    noise: &GradientNoiseModel,
    mut clock: Option<&mut dyn FnMut() -> f64>,
) -> Result<IterateTrace> {
    let mut rng = noise.rng();
    let mut trace = IterateTrace::new(
        solver.name(),
        solver.x().clone(),
        solver.lambda().cloned(),
        solver.steps_per_slice(),
    );
    let mut grid = TimeGrid::new(1.0, problem.horizon())?;
    while let Some(slice) = crate::advance(problem, &mut grid)? {
        let start = clock.as_mut().map(|c| c());
        let mut rec = solver.step(&slice, noise, &mut rng)?;
        if let (Some(start), Some(c)) = (start, clock.as_mut()) {
            rec.wall_time = c() - start;
        }
        trace.push(rec);
    }
    Ok(trace)
}

/// Batch solutions `x_t*` for every slice, each warm-started from the previous.
pub fn oracle_sequence(
    problem: &dyn TimeVaryingProblem,
    opts: &BatchOptions,
) -> Result<Vec<BatchOracleResult>> {
    let mut out: Vec<BatchOracleResult> = Vec::with_capacity(problem.horizon());
    for t in 1..=problem.horizon() {
        let slice = problem.slice(t)?;
        let mut o = opts.clone();
        if o.warm_start.is_none() {
            o.warm_start = out.last().map(|r| r.x_star.clone());
        }
        out.push(batch_solve_with(&slice, &o)?);
    }
    Ok(out)
}

/// Regularized saddle points `z_t* = (x_t*, lambda_t*)` for every slice.
pub fn saddle_sequence(
    problem: &dyn TimeVaryingProblem,
    r: f64,
    opts: &BatchOptions,
) -> Result<Vec<BatchOracleResult>> {
    let mut out: Vec<BatchOracleResult> = Vec::with_capacity(problem.horizon());
    for t in 1..=problem.horizon() {
        let slice = problem.slice(t)?;
        let mut o = opts.clone();
        if o.warm_start.is_none() {
            o.warm_start = out.last().map(|r| r.x_star.clone());
        }
        out.push(saddle_solve(&slice, r, &o)?);
    }
    Ok(out)
}
