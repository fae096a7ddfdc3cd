#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use super::{
    build_metropolis_weights, AsyncSamplingModel, ConsensusMethod, ConsensusState, Graph, LocalCosts, MixingMatrix,
    StepSchedule,
};
use crate::error::invalid;
use crate::math::sym_eig_extremes;
use crate::metrics::MetricSeries;
use crate::problems::ConsensusCostGen;
use crate::solvers::batch_solve;
use crate::{Error, Matrix, ProblemSlice, Result, SmoothFn, SmoothPart, TimeVaryingProblem, Vector};

/// Runs `horizon` rounds from `y = 0` and records
/// `sum_i |y_{i,t} - x_t*| / N` with `x_t*` from `optimum(t)`.
pub fn run_consensus(
    method: ConsensusMethod,
    graph: &Graph,
    w: &MixingMatrix,
    costs: &dyn LocalCosts,
    horizon: usize,
    sampler: &AsyncSamplingModel,
    mut optimum: impl FnMut(usize) -> Result<f64>,
) -> Result<(MetricSeries, ConsensusState)> {
    let n = graph.nodes();
    let mut state = ConsensusState::new(method, graph, Vector::zeros(n))?;
    let mut errors = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        state.step(graph, w, costs, t, sampler)?;
        let x = optimum(t)?;
        errors.push(state.y.iter().map(|y| (y - x).abs()).sum::<f64>() / n as f64);
    }
    Ok((MetricSeries::running_sum(method.label(), errors), state))
}

/// Least-squares line through `(k, ln v_k)`; returns `(slope, R^2)`, or
/// `None` when fewer than 3 values are given or any is not positive.
pub fn decay_fit(values: &[f64]) -> Option<(f64, f64)> {
    if values.len() < 3 || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let n = values.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = (n - 1.0) / 2.0;
    let my = logs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (k, y) in logs.iter().enumerate() {
        let dx = k as f64 - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

/// Outcome of [`dgd_fixed_point_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DgdFixedPointReport {
    pub alpha: f64,
    pub fixed_point: Vector,
    /// Minimizer of `sum_i h_i(y_i) + 1/(2 alpha) y' (I - W) y`.
    pub penalized: Vector,
    /// Minimizer of `sum_i h_i(x)`.
    pub consensus_optimum: f64,
    /// `||fixed_point - penalized||`.
    pub gap_penalized: f64,
    /// `||fixed_point - 1 x*||`.
    pub gap_optimum: f64,
    pub iterations: usize,
}

/// Penalized network cost over the stacked iterate.
#[derive(Clone)]
struct Penalized<C> {
    costs: C,
    laplacian: Matrix,
    alpha: f64,
}

impl<C> core::fmt::Debug for Penalized<C> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Penalized").field("alpha", &self.alpha).finish()
    }
}

impl<C: LocalCosts> SmoothFn for Penalized<C> {
    fn dim(&self) -> usize {
        self.costs.nodes()
    }

    fn value(&self, y: &Vector) -> f64 {
        let local: f64 = (0..y.len()).map(|i| self.costs.value(i, 1, y[i])).sum();
        local + y.dot(&(&self.laplacian * y)) / (2.0 * self.alpha)
    }

    fn gradient(&self, y: &Vector) -> Vector {
        let local = Vector::from_iterator(y.len(), (0..y.len()).map(|i| self.costs.gradient(i, 1, y[i])));
        local + &self.laplacian * y / self.alpha
    }
}

/// `sum_i h_{i,t}(x)` at a fixed `t`.
#[derive(Clone)]
struct NetworkSum<C> {
    costs: C,
    t: usize,
}

impl<C> core::fmt::Debug for NetworkSum<C> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("NetworkSum").field("t", &self.t).finish()
    }
}

impl<C: LocalCosts> SmoothFn for NetworkSum<C> {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> f64 {
        (0..self.costs.nodes()).map(|i| self.costs.value(i, self.t, x[0])).sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_element(1, (0..self.costs.nodes()).map(|i| self.costs.gradient(i, self.t, x[0])).sum())
    }
}

fn network_optimum<C: LocalCosts + Clone + 'static>(costs: &C, t: usize, tol: f64) -> Result<f64> {
    let n = costs.nodes() as f64;
    let smooth = SmoothPart::from_fn(
        NetworkSum {
            costs: costs.clone(),
            t,
        },
        costs.mu() * n,
        costs.lip() * n,
    )?;
    Ok(batch_solve(&ProblemSlice::new(t, smooth), tol)?.x_star[0])
}

/// Runs constant-step DGD on static costs (sampled at `t = 1`) until the
/// iterate stops moving, then compares it with the penalized minimizer and
/// with the consensus optimizer.
pub fn dgd_fixed_point_check<C: LocalCosts + Clone + 'static>(
    graph: &Graph,
    costs: &C,
    alpha: f64,
) -> Result<DgdFixedPointReport> {
    if !(alpha > 0.0) {
        return Err(invalid("alpha must be positive"));
    }
    let n = graph.nodes();
    if costs.nodes() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: costs.nodes(),
        });
    }
    let w = build_metropolis_weights(graph)?;
    let cap = 2_000_000;
    let mut y = Vector::zeros(n);
    let mut iterations = 0;
    loop {
        let g = Vector::from_iterator(n, (0..n).map(|i| costs.gradient(i, 1, y[i])));
        let next = super::dgd_step(&y, &w, &g, alpha)?;
        let moved = (&next - &y).amax();
        y = next;
        iterations += 1;
        if !y.iter().all(|v| v.is_finite()) || iterations >= cap {
            return Err(Error::NoConvergence {
                iterations,
                residual: moved,
                best: y,
            });
        }
        if moved <= 1e-15 * (1.0 + y.amax()) {
            break;
        }
    }
    let laplacian = Matrix::identity(n, n) - w.matrix();
    let (_, top) = sym_eig_extremes(&laplacian);
    let smooth = SmoothPart::from_fn(
        Penalized {
            costs: costs.clone(),
            laplacian,
            alpha,
        },
        costs.mu(),
        costs.lip() + top / alpha,
    )?;
    let penalized = batch_solve(&ProblemSlice::new(1, smooth), 1e-12)?.x_star;
    let x_star = network_optimum(costs, 1, 1e-12)?;
    Ok(DgdFixedPointReport {
        alpha,
        gap_penalized: (&y - &penalized).norm(),
        gap_optimum: y.add_scalar(-x_star).norm(),
        fixed_point: y,
        penalized,
        consensus_optimum: x_star,
        iterations,
    })
}

/// Cost sampling regimes of the network experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Frozen costs (`omega = b = 0`).
    Static,
    Synchronous,
    Asynchronous,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Static, Scenario::Synchronous, Scenario::Asynchronous];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Static => "static",
            Self::Synchronous => "tv-sync",
            Self::Asynchronous => "tv-async",
        }
    }
}

/// Settings of the network tracking experiment. Unset step parameters use
/// `alpha = lambda_min((I + W)/2) / L` for EXTRA and
/// `beta = mu / lambda_max(Laplacian)` for dual decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig6Config {
    pub nodes: usize,
    pub horizon: usize,
    /// Connection radius of the random geometric graph.
    pub radius: f64,
    /// Overrides the random geometric graph.
    pub graph: Option<Graph>,
    pub max_delay: usize,
    pub dgd_alpha: f64,
    pub dgd_alpha0: f64,
    pub extra_alpha: Option<f64>,
    pub dual_beta: Option<f64>,
    pub admm_rho: f64,
    pub seed: u64,
}

impl Default for Fig6Config {
    fn default() -> Self {
        Self {
            nodes: 20,
            horizon: 1000,
            radius: 0.4,
            graph: None,
            max_delay: 10,
            dgd_alpha: 0.1,
            dgd_alpha0: 1.0,
            extra_alpha: None,
            dual_beta: None,
            admm_rho: 1.0,
            seed: 0,
        }
    }
}

/// Error series of one method in one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig6Series {
    pub scenario: Scenario,
    pub method: &'static str,
    pub error: MetricSeries,
    /// `max_{i,j} |y_i - y_j|` after the last round.
    pub final_spread: f64,
}

impl Fig6Config {
    pub fn graph(&self) -> Result<Graph> {
        match &self.graph {
            Some(g) if g.nodes() != self.nodes => Err(invalid(format!(
                "graph has {} nodes, config asks for {}",
                g.nodes(),
                self.nodes
            ))),
            Some(g) => Ok(g.clone()),
            None => Graph::random_geometric(self.nodes, self.radius, crate::math::derive_seed(self.seed, &[1])),
        }
    }

    pub fn methods(&self, graph: &Graph, w: &MixingMatrix) -> Vec<ConsensusMethod> {
        let (mu, lip) = (crate::problems::CONSENSUS_MU, crate::problems::CONSENSUS_L);
        let extra_alpha = self.extra_alpha.unwrap_or_else(|| (1.0 + w.lambda_min()) / 2.0 / lip);
        let dual_beta = self
            .dual_beta
            .unwrap_or_else(|| mu / sym_eig_extremes(&graph.laplacian()).1.max(f64::MIN_POSITIVE));
        alloc::vec![
            ConsensusMethod::Dgd(StepSchedule::Vanishing {
                alpha0: self.dgd_alpha0
            }),
            ConsensusMethod::Dgd(StepSchedule::Constant(self.dgd_alpha)),
            ConsensusMethod::Extra { alpha: extra_alpha },
            ConsensusMethod::DualDecomposition { beta: dual_beta },
            ConsensusMethod::Admm { rho: self.admm_rho },
        ]
    }
}

/// Runs every method in every [`Scenario`]; `x_t*` is the batch minimizer of
/// the aggregate cost at tolerance `1e-10`.
pub fn run_fig6_experiment(cfg: &Fig6Config) -> Result<Vec<Fig6Series>> {
    if cfg.horizon == 0 {
        return Err(invalid("horizon must be positive"));
    }
    let graph = cfg.graph()?;
    let w = build_metropolis_weights(&graph)?;
    let tv = ConsensusCostGen::new(cfg.nodes, cfg.horizon, crate::math::derive_seed(cfg.seed, &[2]))?;
    let frozen = tv.to_static();
    let static_opt = network_optimum(&frozen, 1, 1e-10)?;
    let tv_opt: Vec<f64> = (1..=cfg.horizon)
        .map(|t| Ok(batch_solve(&tv.slice(t)?, 1e-10)?.x_star[0]))
        .collect::<Result<_>>()?;
    let methods = cfg.methods(&graph, &w);
    let mut out = Vec::with_capacity(15);
    for scenario in Scenario::ALL {
        let (costs, sampler) = match scenario {
            Scenario::Static => (&frozen, AsyncSamplingModel::synchronous()),
            Scenario::Synchronous => (&tv, AsyncSamplingModel::synchronous()),
            Scenario::Asynchronous => (
                &tv,
                AsyncSamplingModel::new(cfg.max_delay, crate::math::derive_seed(cfg.seed, &[3])),
            ),
        };
        for method in &methods {
            let (error, state) = run_consensus(*method, &graph, &w, costs, cfg.horizon, &sampler, |t| {
                Ok(if scenario == Scenario::Static {
                    static_opt
                } else {
                    tv_opt[t - 1]
                })
            })?;
            out.push(Fig6Series {
                scenario,
                method: method.label(),
                error,
                final_spread: state.spread(),
            });
        }
    }
    Ok(out)
}
