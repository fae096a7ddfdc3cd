use alloc::vec::Vec;

use super::{AsyncSamplingModel, Graph, LocalCosts, MixingMatrix};
use crate::error::{check_dim, invalid};
use crate::{Result, Vector};

/// DGD step sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `alpha0 / t`.
    Vanishing { alpha0: f64 },
}

impl StepSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            Self::Constant(a) => a,
            Self::Vanishing { alpha0 } => alpha0 / t.max(1) as f64,
        }
    }
}

/// A consensus recursion and its parameters.
///
/// * DGD: `y_t = W y_{t-1} - alpha_t v_t`.
/// * EXTRA (Shi, Ling, Wu, Yin 2015):
///   `y_{k+1} = (I + W) y_k - W~ y_{k-1} - alpha (v_k - v_{k-1})` with
///   `W~ = (I + W)/2`; the first round is a DGD step.
/// * Dual decomposition on edge constraints `y_i = y_j`: exact local
///   minimization of the Lagrangian, then `lambda_e += beta (y_i - y_j)`.
/// * Decentralized ADMM (Shi, Ling, Yuan, Wu, Yin 2014):
///   `y_i = argmin h_i(y) + (a_i - rho sum_j (y_i + y_j)) y + rho d_i y^2`,
///   then `a_i += rho sum_j (y_i - y_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConsensusMethod {
    Dgd(StepSchedule),
    Extra { alpha: f64 },
    DualDecomposition { beta: f64 },
    Admm { rho: f64 },
}

impl ConsensusMethod {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Dgd(StepSchedule::Vanishing { .. }) => "dgd-vanishing",
            Self::Dgd(StepSchedule::Constant(_)) => "dgd-constant",
            Self::Extra { .. } => "extra",
            Self::DualDecomposition { .. } => "dual-decomposition",
            Self::Admm { .. } => "admm",
        }
    }

    fn validate(&self) -> Result<()> {
        let p = match *self {
            Self::Dgd(StepSchedule::Constant(a)) => a,
            Self::Dgd(StepSchedule::Vanishing { alpha0 }) => alpha0,
            Self::Extra { alpha } => alpha,
            Self::DualDecomposition { beta } => beta,
            Self::Admm { rho } => rho,
        };
        if p > 0.0 && p.is_finite() {
            Ok(())
        } else {
            Err(invalid("consensus step parameter must be positive"))
        }
    }
}

/// View of one node after a round.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub y: f64,
    /// EXTRA: previous iterate and gradient; ADMM: local dual; otherwise empty.
    pub aux: Vec<f64>,
    pub sample_time: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Aux {
    None,
    Extra { prev: Option<(Vector, Vector)> },
    Dual { lambda: Vec<f64> },
    Admm { dual: Vector },
}

/// Iterates of every node plus method-specific memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    pub method: ConsensusMethod,
    pub y: Vector,
    /// Sample times used in the last round.
    pub sample_times: Vec<usize>,
    aux: Aux,
}

impl ConsensusState {
    pub fn new(method: ConsensusMethod, graph: &Graph, y0: Vector) -> Result<Self> {
        method.validate()?;
        check_dim(graph.nodes(), y0.len())?;
        let aux = match method {
            ConsensusMethod::Dgd(_) => Aux::None,
            ConsensusMethod::Extra { .. } => Aux::Extra { prev: None },
            ConsensusMethod::DualDecomposition { .. } => Aux::Dual {
                lambda: alloc::vec![0.0; graph.edges().len()],
            },
            ConsensusMethod::Admm { .. } => Aux::Admm {
                dual: Vector::zeros(graph.nodes()),
            },
        };
        Ok(Self {
            method,
            sample_times: alloc::vec![0; y0.len()],
            y: y0,
            aux,
        })
    }

    /// One synchronized round `t >= 1`.
    pub fn step(
        &mut self,
        graph: &Graph,
        w: &MixingMatrix,
        costs: &dyn LocalCosts,
        t: usize,
        sampler: &AsyncSamplingModel,
    ) -> Result<()> {
        check_dim(costs.nodes(), graph.nodes())?;
        check_dim(w.nodes(), graph.nodes())?;
        let times = sampler.sample_times(graph.nodes(), t);
        let grads = |y: &Vector| Vector::from_iterator(y.len(), (0..y.len()).map(|i| costs.gradient(i, times[i], y[i])));
        self.y = match (&mut self.aux, self.method) {
            (Aux::None, ConsensusMethod::Dgd(schedule)) => dgd_step(&self.y, w, &grads(&self.y), schedule.at(t))?,
            (Aux::Extra { prev }, ConsensusMethod::Extra { alpha }) => {
                let g = grads(&self.y);
                let next = extra_step(&self.y, prev.as_ref().map(|(y, g)| (y, g)), w, &g, alpha)?;
                *prev = Some((self.y.clone(), g));
                next
            }
            (Aux::Dual { lambda }, ConsensusMethod::DualDecomposition { beta }) => {
                dual_decomp_step(costs, graph, lambda, beta, &times)?
            }
            (Aux::Admm { dual }, ConsensusMethod::Admm { rho }) => admm_step(costs, graph, &self.y, dual, rho, &times)?,
            _ => unreachable!("auxiliary state always matches the method"),
        };
        self.sample_times = times;
        Ok(())
    }

    pub fn nodes(&self) -> Vec<NodeState> {
        (0..self.y.len())
            .map(|i| NodeState {
                id: i,
                y: self.y[i],
                aux: match &self.aux {
                    Aux::None | Aux::Dual { .. } => Vec::new(),
                    Aux::Extra { prev: None } => Vec::new(),
                    Aux::Extra { prev: Some((y, g)) } => alloc::vec![y[i], g[i]],
                    Aux::Admm { dual } => alloc::vec![dual[i]],
                },
                sample_time: self.sample_times[i],
            })
            .collect()
    }

    /// `max_{i,j} |y_i - y_j|`.
    pub fn spread(&self) -> f64 {
        self.y.max() - self.y.min()
    }
}

/// Stacked DGD update `W y - alpha v`.
pub fn dgd_step(y: &Vector, w: &MixingMatrix, grads: &Vector, alpha: f64) -> Result<Vector> {
    check_dim(w.nodes(), y.len())?;
    check_dim(y.len(), grads.len())?;
    Ok(w.matrix() * y - grads * alpha)
}

/// DGD update written node by node over the neighbor lists.
pub fn dgd_step_per_node(y: &Vector, graph: &Graph, w: &MixingMatrix, grads: &Vector, alpha: f64) -> Result<Vector> {
    check_dim(graph.nodes(), y.len())?;
    check_dim(y.len(), grads.len())?;
    Ok(Vector::from_iterator(
        y.len(),
        (0..y.len()).map(|i| {
            let mixed: f64 = w.weight(i, i) * y[i] + graph.neighbors(i).iter().map(|&j| w.weight(i, j) * y[j]).sum::<f64>();
            mixed - alpha * grads[i]
        }),
    ))
}

/// One EXTRA round; `prev` holds the previous iterate and its gradient.
pub fn extra_step(
    y: &Vector,
    prev: Option<(&Vector, &Vector)>,
    w: &MixingMatrix,
    grads: &Vector,
    alpha: f64,
) -> Result<Vector> {
    check_dim(w.nodes(), y.len())?;
    check_dim(y.len(), grads.len())?;
    let wy = w.matrix() * y;
    Ok(match prev {
        None => wy - grads * alpha,
        Some((yp, gp)) => {
            check_dim(y.len(), yp.len())?;
            let w_tilde_yp = (yp + w.matrix() * yp) * 0.5;
            y + wy - w_tilde_yp - (grads - gp) * alpha
        }
    })
}

/// One dual-decomposition round; `lambda` holds one multiplier per edge in
/// [`Graph::edges`] order and is updated in place.
pub fn dual_decomp_step(
    costs: &dyn LocalCosts,
    graph: &Graph,
    lambda: &mut [f64],
    beta: f64,
    times: &[usize],
) -> Result<Vector> {
    let n = graph.nodes();
    check_dim(graph.edges().len(), lambda.len())?;
    check_dim(n, times.len())?;
    let mut s = alloc::vec![0.0; n];
    for (&(i, j), l) in graph.edges().iter().zip(lambda.iter()) {
        s[i] += l;
        s[j] -= l;
    }
    let mut y = Vector::zeros(n);
    for i in 0..n {
        y[i] = costs.local_argmin(i, times[i], 0.0, -s[i])?;
    }
    for (&(i, j), l) in graph.edges().iter().zip(lambda.iter_mut()) {
        *l += beta * (y[i] - y[j]);
    }
    Ok(y)
}

/// One decentralized ADMM round; `dual` is updated in place.
pub fn admm_step(
    costs: &dyn LocalCosts,
    graph: &Graph,
    y: &Vector,
    dual: &mut Vector,
    rho: f64,
    times: &[usize],
) -> Result<Vector> {
    let n = graph.nodes();
    check_dim(n, y.len())?;
    check_dim(n, dual.len())?;
    check_dim(n, times.len())?;
    if !(rho > 0.0) {
        return Err(invalid("ADMM penalty must be positive"));
    }
    let mut next = Vector::zeros(n);
    for i in 0..n {
        let nb = graph.neighbors(i);
        let pull: f64 = nb.iter().map(|&j| y[i] + y[j]).sum();
        let c = 2.0 * rho * nb.len() as f64;
        next[i] = costs.local_argmin(i, times[i], c, rho * pull - dual[i])?;
    }
    for i in 0..n {
        dual[i] += rho * graph.neighbors(i).iter().map(|&j| next[i] - next[j]).sum::<f64>();
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::super::{build_metropolis_weights, QuadraticCosts};
    use super::*;
    use alloc::vec;

    fn run(method: ConsensusMethod, graph: &Graph, costs: &dyn LocalCosts, rounds: usize) -> ConsensusState {
        let w = build_metropolis_weights(graph).unwrap();
        let mut s = ConsensusState::new(method, graph, Vector::zeros(graph.nodes())).unwrap();
        for t in 1..=rounds {
            s.step(graph, &w, costs, t, &AsyncSamplingModel::synchronous()).unwrap();
        }
        s
    }

    #[test]
    fn single_node_is_gradient_descent() {
        let g = Graph::new(1, &[]).unwrap();
        let costs = QuadraticCosts::new(vec![2.0], vec![3.0]).unwrap();
        for method in [
            ConsensusMethod::Dgd(StepSchedule::Constant(0.1)),
            ConsensusMethod::Extra { alpha: 0.1 },
        ] {
            let s = run(method, &g, &costs, 3);
            let mut x = 0.0;
            for _ in 0..3 {
                x -= 0.1 * 2.0 * (x - 3.0);
            }
            assert!((s.y[0] - x).abs() < 1e-15, "{}", method.label());
        }
        // Without neighbors the other two solve the local problem exactly.
        for method in [ConsensusMethod::DualDecomposition { beta: 0.5 }, ConsensusMethod::Admm { rho: 1.0 }] {
            assert!((run(method, &g, &costs, 1).y[0] - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_gradients_average() {
        let g = Graph::ring(5).unwrap();
        let costs = QuadraticCosts::centered(vec![0.0; 5]).unwrap();
        let w = build_metropolis_weights(&g).unwrap();
        let mut y = Vector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        for _ in 0..300 {
            y = dgd_step(&y, &w, &Vector::zeros(5), 0.1).unwrap();
        }
        assert!((y.add_scalar(-3.0)).amax() < 1e-12);
        let _ = costs;
    }

    #[test]
    fn stacked_and_per_node_agree() {
        let g = Graph::random_geometric(15, 0.4, 2).unwrap();
        let w = build_metropolis_weights(&g).unwrap();
        let y = Vector::from_iterator(15, (0..15).map(|i| (i as f64 * 1.7).sin() * 3.0));
        let v = Vector::from_iterator(15, (0..15).map(|i| (i as f64 * 0.3).cos()));
        let a = dgd_step(&y, &w, &v, 0.37).unwrap();
        let b = dgd_step_per_node(&y, &g, &w, &v, 0.37).unwrap();
        assert!((a - b).amax() < 1e-14);
    }

    #[test]
    fn exact_methods_reach_mean_of_centers() {
        let g = Graph::random_geometric(10, 0.5, 7).unwrap();
        let centers: Vec<f64> = (0..10).map(|i| i as f64 - 4.0).collect();
        let costs = QuadraticCosts::centered(centers).unwrap();
        let target = costs.consensus_optimum();
        let w = build_metropolis_weights(&g).unwrap();
        let beta = 1.0 / crate::math::sym_eig_extremes(&g.laplacian()).1;
        for method in [
            ConsensusMethod::Extra { alpha: (1.0 + w.lambda_min()) / 2.0 },
            ConsensusMethod::DualDecomposition { beta },
            ConsensusMethod::Admm { rho: 0.5 },
        ] {
            let s = run(method, &g, &costs, 3000);
            assert!((s.y.add_scalar(-target)).amax() < 1e-6, "{} {:?}", method.label(), s.y);
            assert!(s.spread() < 1e-6);
        }
    }

    #[test]
    fn identical_costs_reach_common_minimizer() {
        let g = Graph::ring(6).unwrap();
        let costs = QuadraticCosts::new(vec![1.3; 6], vec![2.5; 6]).unwrap();
        let w = build_metropolis_weights(&g).unwrap();
        let beta = 1.0 / crate::math::sym_eig_extremes(&g.laplacian()).1;
        for method in [
            ConsensusMethod::Extra { alpha: (1.0 + w.lambda_min()) / 2.6 },
            ConsensusMethod::DualDecomposition { beta },
            ConsensusMethod::Admm { rho: 1.0 },
        ] {
            let s = run(method, &g, &costs, 2000);
            assert!((s.y.add_scalar(-2.5)).amax() < 1e-8, "{}", method.label());
        }
    }

    #[test]
    fn node_view_reports_sample_times() {
        let g = Graph::ring(4).unwrap();
        let costs = QuadraticCosts::centered(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let w = build_metropolis_weights(&g).unwrap();
        let mut s = ConsensusState::new(ConsensusMethod::Admm { rho: 1.0 }, &g, Vector::zeros(4)).unwrap();
        let sampler = AsyncSamplingModel::new(3, 1);
        for t in 1..=20 {
            s.step(&g, &w, &costs, t, &sampler).unwrap();
            for n in s.nodes() {
                assert!(n.sample_time <= t && t - n.sample_time <= 3);
                assert_eq!(n.aux.len(), 1);
            }
        }
    }
}
