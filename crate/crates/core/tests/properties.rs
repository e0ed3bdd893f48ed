use proptest::prelude::*;

use locol::analysis::{check_structural_claims, DiagnosticRun};
use locol::decomposition::{greedy_matchings, matching_breaker, orient_into_functions};
use locol::driver::{edge_color, DriverParams, Mode};
use locol::engine::{build_k, initial_matching_lenient, run_rounds, RunOptions, Schedule};
use locol::generators::{random_bounded_degree, random_regular};
use locol::labeling::{sparse_labeling, verify_labeling};
use locol::oracle::{brute_augmenting_path, verify_proper, AugmentingQuery};
use locol::precolor::{extend_precoloring, random_precoloring, ExtendOptions};
use locol::{Edge, Exec, Graph, Instance};

fn small_graph() -> impl Strategy<Value = Graph> {
    (4usize..40, 1usize..=4, any::<u64>()).prop_map(|(n, d, seed)| random_bounded_degree(n, d, n * d / 2, seed))
}

fn instance_of(g: Graph) -> Instance {
    let d = g.max_degree().max(1);
    Instance::new(g, d, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labelings_are_sparse(g in small_graph(), k in 1usize..5) {
        let lab = sparse_labeling(&g, k);
        prop_assert!(verify_labeling(&g, &lab));
    }

    #[test]
    fn edge_list_round_trip(g in small_graph()) {
        let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn rounds_leave_no_short_augmenting_path(g in small_graph(), n0 in 1usize..8) {
        let inst = instance_of(g);
        let s = Schedule { n0, ..Schedule::practical() };
        let kctx = build_k(&inst, s.r, s.r_prime, &sparse_labeling(&inst.graph, s.r + 2));
        let (m0, _) = initial_matching_lenient(&inst, s.r1);
        let st = run_rounds(&inst, &kctx, m0, n0, RunOptions::default()).unwrap();
        prop_assert!(st.matching.is_valid_in(&inst.graph));
        let edges = st.matching.edges();
        let k: Vec<usize> = kctx.k.iter().collect();
        let q = AugmentingQuery { g: &inst.graph, d: inst.d, k: &k, matching: &edges };
        prop_assert_eq!(brute_augmenting_path(&q, n0).unwrap(), None);
    }

    #[test]
    fn colorings_are_proper_and_deterministic(g in small_graph()) {
        let inst = instance_of(g);
        let mode = if inst.bipartite { Mode::Bipartite } else { Mode::General };
        let seq = DriverParams { exec: Exec::Sequential, ..DriverParams::default() };
        let par = DriverParams { exec: Exec::Parallel, ..DriverParams::default() };
        let a = edge_color(&inst, mode, &seq).unwrap();
        let b = edge_color(&inst, mode, &par).unwrap();
        prop_assert!(verify_proper(&inst.graph, &a.colored_pairs()));
        prop_assert_eq!(&a.colors, &b.colors);
        if mode == Mode::Bipartite {
            prop_assert!(a.palette_used() <= inst.d + 1);
        }
    }

    #[test]
    fn claims_hold_on_optimized_matchings(g in small_graph(), n0 in 3usize..10) {
        let inst = instance_of(g);
        let s = Schedule { n0, ..Schedule::practical() };
        let kctx = build_k(&inst, s.r, s.r_prime, &sparse_labeling(&inst.graph, s.r + 2));
        let (m0, _) = initial_matching_lenient(&inst, s.r1);
        let st = run_rounds(&inst, &kctx, m0, n0, RunOptions::default()).unwrap();
        let run = DiagnosticRun { inst: &inst, kctx: &kctx, matching: st.matching.edges(), n0, c_tilde: 12 };
        let rep = check_structural_claims(&run, Exec::Sequential);
        prop_assert!(rep.all_pass(), "{:?}", rep.failures());
    }

    #[test]
    fn extensions_respect_precoloring(d in 4usize..20, seed in any::<u64>()) {
        let pc = random_precoloring(2 * d, d, seed);
        let ext = extend_precoloring(&pc, &ExtendOptions { samples: 16, seed });
        prop_assert!(verify_proper(&pc.graph, &ext.coloring.pairs()));
        prop_assert_eq!(ext.coloring.pairs().len(), pc.graph.edge_count());
        for (&e, &c) in &pc.colored_leaves {
            prop_assert_eq!(ext.coloring.color_of(e), Some(c));
        }
    }

    #[test]
    fn orientations_and_matchings_partition_edges(g in small_graph()) {
        let d = g.max_degree().max(1);
        let o = orient_into_functions(&g, d, &sparse_labeling(&g, 2)).unwrap();
        prop_assert!(o.k() <= d);
        prop_assert!(o.verify(&g, false).is_ok());
        let classes = greedy_matchings(&g);
        prop_assert!(classes.len() <= (2 * g.max_degree()).saturating_sub(1));
        let total: usize = classes.iter().map(Vec::len).sum();
        prop_assert_eq!(total, g.edge_count());
    }

    #[test]
    fn breaker_bounds_unions_of_two_matchings(n in 10usize..80, seed in any::<u64>()) {
        // A 2-regular bipartite graph splits into two perfect matchings.
        let inst = random_regular(2 * n, 2, true, seed).unwrap();
        let edges = inst.graph.edges();
        let classes = greedy_matchings(&inst.graph);
        let f0: Vec<Edge> = classes.get(2).cloned().unwrap_or_default();
        let f1: Vec<Edge> = edges.iter().copied().filter(|e| !f0.contains(e)).collect();
        let out = matching_breaker(2 * n, &[f1], &f0, &[8, 16]).unwrap();
        prop_assert!(out.largest.iter().all(|&s| s <= out.bound));
        let m = locol::Matching::from_edges(&inst.graph, &out.matching);
        prop_assert!(m.is_ok());
    }
}
