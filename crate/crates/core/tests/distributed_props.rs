use proptest::prelude::*;
use tvopt_core::distributed::{
    build_metropolis_weights, dgd_step, dgd_step_per_node, AsyncSamplingModel, ConsensusMethod, ConsensusState,
    Graph, QuadraticCosts,
};
use tvopt_core::problems::ConsensusCostGen;
use tvopt_core::Vector;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..25, 0.4f64..0.9, any::<u64>()).prop_map(|(n, r, s)| Graph::random_geometric(n, r, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metropolis_weights_are_valid(g in graph_strategy()) {
        let w = build_metropolis_weights(&g).unwrap();
        let m = w.matrix();
        let ones = Vector::from_element(g.nodes(), 1.0);
        prop_assert!((m * &ones - &ones).amax() < 1e-14);
        prop_assert!((m - m.transpose()).amax() == 0.0);
        prop_assert!(m.iter().all(|v| *v >= 0.0));
        prop_assert!(w.lambda_min() > -1.0);
    }

    #[test]
    fn stacked_and_per_node_dgd_agree(g in graph_strategy(), seed in any::<u64>(), alpha in 0.0f64..2.0) {
        let w = build_metropolis_weights(&g).unwrap();
        let n = g.nodes();
        let mut rng = tvopt_core::math::rng_from_seed(seed);
        let y = tvopt_core::math::gaussian_vector(n, &mut rng) * 10.0;
        let v = tvopt_core::math::gaussian_vector(n, &mut rng);
        let a = dgd_step(&y, &w, &v, alpha).unwrap();
        let b = dgd_step_per_node(&y, &g, &w, &v, alpha).unwrap();
        prop_assert!((a - b).amax() <= 1e-14 * (1.0 + y.amax()));
    }

    #[test]
    fn delays_stay_within_bound(d in 0usize..15, seed in any::<u64>(), nodes in 1usize..30) {
        let s = AsyncSamplingModel::new(d, seed);
        for t in 1..200 {
            for ti in s.sample_times(nodes, t) {
                prop_assert!(ti >= 1 && ti <= t && t - ti <= d);
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy()) {
        prop_assert_eq!(Graph::parse(&g.to_edge_list()).unwrap(), g);
    }
}

#[test]
fn static_methods_reach_consensus() {
    let g = Graph::random_geometric(20, 0.4, 5).unwrap();
    let w = build_metropolis_weights(&g).unwrap();
    let costs = ConsensusCostGen::new(20, 10, 5).unwrap().to_static();
    let beta = 1.0 / tvopt_core::math::sym_eig_extremes(&g.laplacian()).1;
    for method in [
        ConsensusMethod::Extra { alpha: (1.0 + w.lambda_min()) / 2.5 },
        ConsensusMethod::DualDecomposition { beta },
        ConsensusMethod::Admm { rho: 1.0 },
    ] {
        let mut s = ConsensusState::new(method, &g, Vector::zeros(20)).unwrap();
        for t in 1..=1500 {
            s.step(&g, &w, &costs, t, &AsyncSamplingModel::synchronous()).unwrap();
        }
        assert!(s.spread() < 1e-6, "{}: spread {}", method.label(), s.spread());
    }
}

#[test]
fn fixed_point_gap_shrinks_with_alpha() {
    let g = Graph::random_geometric(20, 0.4, 6).unwrap();
    let centers: Vec<f64> = (0..20).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    let curv: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * (i % 4) as f64).collect();
    let costs = QuadraticCosts::new(curv, centers).unwrap();
    let gaps: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&a| {
            let r = tvopt_core::distributed::dgd_fixed_point_check(&g, &costs, a).unwrap();
            assert!(r.gap_penalized <= 1e-6, "{}", r.gap_penalized);
            r.gap_optimum
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > 1e-3, "{gaps:?}");
}
