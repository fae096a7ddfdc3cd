//! Simulation of consensus-based time-varying optimization over a graph.
//!
//! Each node `i` holds a scalar iterate `y_i` and a local cost `h_{i,t}`;
//! the network minimizes `sum_i h_{i,t}(x)` over the common `x`. Nodes are
//! indexed from 0.

mod costs;
mod experiment;
mod methods;

pub use costs::{LocalCosts, QuadraticCosts};
pub use experiment::{
    decay_fit, dgd_fixed_point_check, run_consensus, run_fig6_experiment, DgdFixedPointReport, Fig6Config,
    Fig6Series, Scenario,
};
pub use methods::{
    admm_step, dgd_step, dgd_step_per_node, dual_decomp_step, extra_step, ConsensusMethod, ConsensusState,
    NodeState, StepSchedule,
};

#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;
use rand::Rng as _;

use crate::error::invalid;
use crate::math::{derive_seed, rng_from_seed, sym_eig_extremes};
use crate::{Error, Matrix, Result};

/// Undirected connected graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: usize,
    /// Sorted pairs `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if nodes == 0 {
            return Err(invalid("graph needs at least one node"));
        }
        let mut list = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i >= nodes || j >= nodes {
                return Err(invalid(format!("edge ({i}, {j}) out of range for {nodes} nodes")));
            }
            if i == j {
                return Err(invalid(format!("self-loop at node {i}")));
            }
            list.push((i.min(j), i.max(j)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); nodes];
        for &(i, j) in &list {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let g = Self {
            nodes,
            edges: list,
            adjacency,
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn path(nodes: usize) -> Result<Self> {
        let edges: Vec<_> = (1..nodes).map(|i| (i - 1, i)).collect();
        Self::new(nodes, &edges)
    }

    pub fn ring(nodes: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..nodes).map(|i| (i - 1, i)).collect();
        if nodes > 2 {
            edges.push((nodes - 1, 0));
        }
        Self::new(nodes, &edges)
    }

    pub fn complete(nodes: usize) -> Result<Self> {
        let edges: Vec<_> = (0..nodes).flat_map(|i| (i + 1..nodes).map(move |j| (i, j))).collect();
        Self::new(nodes, &edges)
    }

    /// Nodes uniform in the unit square, linked when closer than `radius`.
    /// Redraws (with derived seeds) until the graph is connected.
    pub fn random_geometric(nodes: usize, radius: f64, seed: u64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("radius must be positive"));
        }
        for attempt in 0..1000u64 {
            let mut rng = rng_from_seed(derive_seed(seed, &[attempt]));
            let pts: Vec<(f64, f64)> = (0..nodes).map(|_| (rng.random(), rng.random())).collect();
            let mut edges = Vec::new();
            for i in 0..nodes {
                for j in i + 1..nodes {
                    let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                    if (dx * dx + dy * dy).sqrt() <= radius {
                        edges.push((i, j));
                    }
                }
            }
            match Self::new(nodes, &edges) {
                Err(Error::Disconnected) => continue,
                other => return other,
            }
        }
        Err(Error::Disconnected)
    }

    /// Reads one `i j` pair per line; blank lines and `#` comments are
    /// skipped. The node count is one more than the largest index.
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut nodes = 0;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::Parse {
                line: k + 1,
                message: message.into(),
            };
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<usize> {
                parts
                    .next()
                    .ok_or_else(|| err("expected two node indices"))?
                    .parse()
                    .map_err(|_| err("node index is not a nonnegative integer"))
            };
            let (i, j) = (next()?, next()?);
            if parts.next().is_some() {
                return Err(err("expected two node indices"));
            }
            nodes = nodes.max(i + 1).max(j + 1);
            edges.push((i, j));
        }
        if nodes == 0 {
            return Err(Error::Parse {
                line: 0,
                message: "no edges".into(),
            });
        }
        Self::new(nodes, &edges)
    }

    /// Inverse of [`Graph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.nodes, self.nodes);
        for &(i, j) in &self.edges {
            l[(i, j)] -= 1.0;
            l[(j, i)] -= 1.0;
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
        }
        l
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.nodes
    }
}

/// Symmetric, doubly stochastic weights supported on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    w: Matrix,
}

impl MixingMatrix {
    /// Checks every invariant against `graph`.
    pub fn new(w: Matrix, graph: &Graph) -> Result<Self> {
        let n = graph.nodes();
        if w.nrows() != n || w.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: w.nrows() * w.ncols(),
            });
        }
        let tol = 1e-12;
        for i in 0..n {
            let row: f64 = w.row(i).sum();
            if (row - 1.0).abs() > tol {
                return Err(invalid(format!("row {i} sums to {row}")));
            }
            for j in 0..n {
                let v = w[(i, j)];
                if v < 0.0 || (v - w[(j, i)]).abs() > tol {
                    return Err(invalid(format!("weight ({i}, {j}) is negative or asymmetric")));
                }
                if v > 0.0 && i != j && !graph.neighbors(i).contains(&j) {
                    return Err(invalid(format!("weight ({i}, {j}) off the graph")));
                }
            }
        }
        let (lo, hi) = sym_eig_extremes(&w);
        if lo < -1.0 - 1e-10 || (hi - 1.0).abs() > 1e-10 {
            return Err(invalid("spectrum of W outside [-1, 1]"));
        }
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn nodes(&self) -> usize {
        self.w.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[(i, j)]
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        sym_eig_extremes(&self.w).0
    }
}

/// `w_ij = 1/(1 + max(deg_i, deg_j))` on edges, remainder on the diagonal.
pub fn build_metropolis_weights(graph: &Graph) -> Result<MixingMatrix> {
    let n = graph.nodes();
    let mut w = Matrix::zeros(n, n);
    for &(i, j) in graph.edges() {
        let v = 1.0 / (1.0 + graph.degree(i).max(graph.degree(j)) as f64);
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    for i in 0..n {
        let off: f64 = graph.neighbors(i).iter().map(|&j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    MixingMatrix::new(w, graph)
}

/// Per-node sampling delays, uniform on `{0, ..., max_delay}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AsyncSamplingModel {
    pub max_delay: usize,
    pub seed: u64,
}

impl Default for AsyncSamplingModel {
    fn default() -> Self {
        Self { max_delay: 10, seed: 0 }
    }
}

impl AsyncSamplingModel {
    pub fn synchronous() -> Self {
        Self { max_delay: 0, seed: 0 }
    }

    pub fn new(max_delay: usize, seed: u64) -> Self {
        Self { max_delay, seed }
    }

    /// Sample time of node `i` at round `t >= 1`; never earlier than 1.
    pub fn sample_time(&self, i: usize, t: usize) -> usize {
        if self.max_delay == 0 {
            return t;
        }
        let mut rng = rng_from_seed(derive_seed(self.seed, &[i as u64, t as u64]));
        let d = rng.random_range(0..=self.max_delay);
        t.saturating_sub(d).max(1)
    }

    pub fn sample_times(&self, nodes: usize, t: usize) -> Vec<usize> {
        (0..nodes).map(|i| self.sample_time(i, t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metropolis_examples() {
        let w = build_metropolis_weights(&Graph::path(2).unwrap()).unwrap();
        assert!(w.matrix().iter().all(|&v| v == 0.5));
        let w = build_metropolis_weights(&Graph::complete(3).unwrap()).unwrap();
        assert!(w.matrix().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn metropolis_on_random_graphs() {
        for seed in 0..20 {
            let g = Graph::random_geometric(20, 0.35, seed).unwrap();
            let w = build_metropolis_weights(&g).unwrap();
            let m = w.matrix();
            assert!((m - m.transpose()).norm() == 0.0);
            for i in 0..20 {
                assert!((m.row(i).sum() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn disconnected_and_bad_edges() {
        assert_eq!(Graph::new(3, &[(0, 1)]), Err(Error::Disconnected));
        assert!(Graph::new(2, &[(0, 0), (0, 1)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let g = Graph::parse("# ring\n0 1\n1 2\n\n2 0 # closing\n").unwrap();
        assert_eq!(g, Graph::ring(3).unwrap());
        assert_eq!(Graph::parse(&g.to_edge_list()).unwrap(), g);
        match Graph::parse("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(Graph::parse("0 1 2\n").is_err());
    }

    #[test]
    fn delays_are_bounded() {
        let s = AsyncSamplingModel::new(10, 4);
        let mut seen_max = 0;
        for t in 1..=500 {
            for (i, ti) in s.sample_times(20, t).into_iter().enumerate() {
                assert!(ti >= 1 && ti <= t && t - ti <= 10);
                assert_eq!(ti, s.sample_time(i, t));
                seen_max = seen_max.max(t - ti);
            }
        }
        assert_eq!(seen_max, 10);
        assert_eq!(AsyncSamplingModel::synchronous().sample_times(3, 7), vec![7; 3]);
    }
}
