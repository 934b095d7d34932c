use meshplan_core::generate::random_network;
use meshplan_core::maxflow::max_flow_with_stats;
use meshplan_core::{augmenting_path, brute_force_min_cut, max_flow, SearchStrategy, SolverEngine};
use proptest::prelude::*;

#[test]
fn engines_agree_with_cut_enumeration_on_seeded_networks() {
    for seed in 0..200u64 {
        let nodes = 2 + (seed % 9) as usize;
        let arcs = (seed * 7 % 26) as usize;
        let net = random_network(seed, nodes, arcs, 10_000);
        let cut = brute_force_min_cut(&net).unwrap();
        for engine in SolverEngine::ALL {
            let flow = max_flow(&net, engine);
            assert_eq!(flow.total(), cut, "seed {seed} engine {engine}");
            flow.verify_maximum(&net).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn duality_and_feasibility(seed in any::<u64>(), nodes in 2usize..=10, arcs in 0usize..=25) {
        let net = random_network(seed, nodes, arcs, 10_000);
        let cut = brute_force_min_cut(&net).unwrap();
        for engine in SolverEngine::ALL {
            let (flow, stats) = max_flow_with_stats(&net, engine);
            prop_assert_eq!(flow.total(), cut);
            prop_assert!(flow.verify_maximum(&net).is_ok());
            // Every augmentation pushes at least 1 kbps.
            prop_assert!(stats.augmentations <= flow.total().kbps());
            for strategy in [SearchStrategy::Bfs, SearchStrategy::Dfs] {
                prop_assert_eq!(augmenting_path(&net, &flow, strategy).unwrap(), None);
            }
        }
    }
}
