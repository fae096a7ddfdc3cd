//! Online first-order methods and the batch oracle that supplies `x_t*`.

mod batch;
mod primal_dual;
mod prox_grad;
mod static_methods;

pub use batch::{batch_solve, batch_solve_with, saddle_solve, BatchOptions, BatchOracleResult};
pub use primal_dual::{pd_lipschitz, primal_dual_step, DualRule, PrimalDualState};
pub use prox_grad::{contraction_factor, prox_grad_step, ProxGradState};
pub use static_methods::{
    heavy_ball_polyak, nesterov_v2_momentum, static_method_step, StaticMethod, StaticMethodConfig, StaticMethodState,
    StaticSolver,
};

use crate::{GradientNoiseModel, ProblemSlice, Result, Rng, TraceRecord, Vector};

/// A method that is stepped once per problem slice.
pub trait OnlineSolver {
    fn name(&self) -> &str;
    fn x(&self) -> &Vector;
    fn lambda(&self) -> Option<&Vector> {
        None
    }
    fn steps_per_slice(&self) -> usize {
        1
    }
    fn step(
        &mut self,
        slice: &ProblemSlice,
        noise: &GradientNoiseModel,
        rng: &mut Rng,
    ) -> Result<TraceRecord>;
}
