use std::collections::BinaryHeap;

use mvsp::graph::compose_path;
use mvsp::solver::{
    all_pairs, brute_force_fixed_k, brute_force_oracle, enumerate_simple_paths, fixed_k_path, shortest_path,
    shortest_paths_from, SolverConfig,
};
use mvsp::{synth, AdditiveScalar, EdgeMatrix, Error, MatrixGraph, PathCost, TotalEntropy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perm_uniform_graph() -> MatrixGraph {
    // s -> u and u -> t are permutations, s -> t is uniform
    let p1 = EdgeMatrix::permutation(&[1, 2, 3, 0]).unwrap();
    let p2 = EdgeMatrix::permutation(&[2, 0, 3, 1]).unwrap();
    MatrixGraph::new(
        4,
        vec!["s".into(), "t".into(), "u".into()],
        vec![
            ("s".into(), "u".into(), p1),
            ("u".into(), "t".into(), p2),
            ("s".into(), "t".into(), EdgeMatrix::uniform(4)),
        ],
    )
    .unwrap()
}

fn scalar_graph(nodes: &[&str], edges: &[(&str, &str, f64)]) -> MatrixGraph {
    MatrixGraph::new(
        1,
        nodes.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|&(a, b, w)| (a.to_string(), b.to_string(), EdgeMatrix::scalar(w).unwrap()))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

/// The four-node instance of the pruning illustration.
fn pruning_example() -> MatrixGraph {
    scalar_graph(
        &["a", "b", "s", "t"],
        &[
            ("s", "a", 4.0),
            ("s", "t", 3.5),
            ("s", "b", 1.0),
            ("b", "a", 1.8),
            ("b", "t", 2.0),
            ("a", "t", 0.1),
        ],
    )
}

#[test]
fn two_nodes_give_the_direct_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = synth::random_graph(2, 3, 2.0, &mut rng).unwrap();
    let r = shortest_paths_from(&g, 0, &TotalEntropy, &SolverConfig::certify()).unwrap();
    let p = r.path_to(1).unwrap();
    assert_eq!(p.nodes, vec![0, 1]);
    assert_eq!(p.cost, mvsp::total_entropy(g.edge(0, 1)).unwrap());
    assert!(r.certified);
}

#[test]
fn permutations_beat_the_uniform_edge() {
    let g = perm_uniform_graph();
    let (s, t, u) = (0, 1, 2);
    let r = shortest_paths_from(&g, s, &TotalEntropy, &SolverConfig::certify()).unwrap();
    let p = r.path_to(t).unwrap();
    assert_eq!(p.nodes, vec![s, u, t]);
    assert!(p.cost.abs() < 1e-12);
    let direct = compose_path(&g, &[s, t], &TotalEntropy).unwrap();
    assert!((direct.cost - 4.0 * 4f64.ln()).abs() < 1e-12);
    let oracle = brute_force_oracle(&g, s, t, &TotalEntropy, None).unwrap();
    assert_eq!(oracle.nodes, p.nodes);
}

#[test]
fn pruning_example_candidate_sets() {
    let g = pruning_example();
    let id = |n: &str| g.node_index(n).unwrap();
    let (a, b, s, t) = (id("a"), id("b"), id("s"), id("t"));
    let r = shortest_paths_from(&g, s, &AdditiveScalar, &SolverConfig::certify().with_trace()).unwrap();
    let trace = r.trace.as_ref().unwrap();
    assert_eq!(trace.candidate_set(t, 2), Some(vec![b]));
    assert_eq!(trace.candidate_set(t, 3), Some(vec![a]));
    let best = r.path_to(t).unwrap();
    assert_eq!(best.nodes, vec![s, b, a, t]);
    assert!((best.cost - 2.9).abs() < 1e-12);
    assert!(r.certified);
}

#[test]
fn zero_cost_direct_edge_leaves_no_candidates() {
    let g = scalar_graph(
        &["a", "b", "c", "d"],
        &[
            ("a", "b", 0.0),
            ("a", "c", 1.0),
            ("a", "d", 2.0),
            ("b", "c", 1.0),
            ("b", "d", 1.0),
            ("c", "d", 1.0),
        ],
    );
    let r = shortest_paths_from(&g, 0, &AdditiveScalar, &SolverConfig::certify().with_trace()).unwrap();
    let trace = r.trace.as_ref().unwrap();
    assert_eq!(trace.candidate_set(1, 2), Some(vec![]));
    assert_eq!(r.path_to(1).unwrap().nodes, vec![0, 1]);
}

#[test]
fn source_equals_target_is_trivial() {
    let g = perm_uniform_graph();
    let (p, _) = shortest_path(&g, 2, 2, &TotalEntropy, &SolverConfig::certify()).unwrap();
    assert_eq!(p.nodes, vec![2]);
    assert_eq!(p.cost, 0.0);
}

#[test]
fn usage_errors() {
    let g = perm_uniform_graph();
    let err = shortest_paths_from(&g, 0, &TotalEntropy, &SolverConfig::fixed_k(2)).unwrap_err();
    assert!(matches!(err, Error::Usage(_)));
    assert_eq!(err.exit_code(), 2);
    let err = shortest_paths_from(&g, 0, &TotalEntropy, &SolverConfig::capped(0)).unwrap_err();
    assert!(matches!(err, Error::Usage(_)));
    assert!(matches!(
        shortest_paths_from(&g, 7, &TotalEntropy, &SolverConfig::certify()),
        Err(Error::UnknownNode(_))
    ));
    let err = fixed_k_path(&g, 0, 1, 3, &TotalEntropy).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn matches_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..60 {
        let nodes = rng.random_range(4..=7);
        let dim = rng.random_range(2..=6);
        let g = synth::random_graph(nodes, dim, 3.0, &mut rng).unwrap();
        for s in 0..nodes {
            let r = shortest_paths_from(&g, s, &TotalEntropy, &SolverConfig::certify()).unwrap();
            assert!(r.certified);
            for t in (0..nodes).filter(|&t| t != s) {
                let got = r.path_to(t).unwrap();
                let want = brute_force_oracle(&g, s, t, &TotalEntropy, None).unwrap();
                assert!((got.cost - want.cost).abs() <= 1e-9, "{} vs {}", got.cost, want.cost);
                assert_eq!(got.nodes, want.nodes);
                let again = compose_path(&g, &got.nodes, &TotalEntropy).unwrap();
                assert!((again.cost - got.cost).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn capped_search_matches_capped_oracle_and_is_anytime() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..15 {
        let nodes = rng.random_range(5..=7);
        let g = synth::random_graph(nodes, 4, 3.0, &mut rng).unwrap();
        let t = nodes - 1;
        let mut previous = f64::INFINITY;
        for k in 1..nodes {
            let (p, r) = shortest_path(&g, 0, t, &TotalEntropy, &SolverConfig::capped(k)).unwrap();
            let want = brute_force_oracle(&g, 0, t, &TotalEntropy, Some(k)).unwrap();
            assert!((p.cost - want.cost).abs() <= 1e-9);
            assert!(p.edge_count() <= k);
            assert!(p.cost <= previous + 1e-12);
            if k == 1 {
                assert_eq!(p.cost, compose_path(&g, &[0, t], &TotalEntropy).unwrap().cost);
            }
            if k == nodes - 1 {
                assert!(r.certified);
            }
            previous = p.cost;
        }
    }
}

#[test]
fn fixed_k_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let g = synth::random_graph(6, 3, 3.0, &mut rng).unwrap();
        for k in 1..6 {
            let got = fixed_k_path(&g, 1, 4, k, &TotalEntropy).unwrap();
            let want = brute_force_fixed_k(&g, 1, 4, &TotalEntropy, k).unwrap();
            assert_eq!(got.nodes, want.nodes);
            assert_eq!(got.edge_count(), k);
            assert!((got.cost - want.cost).abs() <= 1e-9);
        }
    }
}

/// Textbook Dijkstra over the scalar weights.
fn dijkstra(weights: &[Vec<f64>], source: usize) -> Vec<f64> {
    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0)
        }
    }
    let n = weights.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Item(0.0, source));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for v in 0..n {
            if v != u && d + weights[u][v] < dist[v] {
                dist[v] = d + weights[u][v];
                heap.push(Item(dist[v], v));
            }
        }
    }
    dist
}

#[test]
fn scalar_costs_reduce_to_dijkstra() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let nodes = rng.random_range(3..=12);
        let g = synth::random_scalar_graph(nodes, 0.0, 10.0, &mut rng).unwrap();
        let w: Vec<Vec<f64>> = (0..nodes)
            .map(|i| {
                (0..nodes)
                    .map(|j| if i == j { 0.0 } else { g.edge(i, j).get(0, 0) })
                    .collect()
            })
            .collect();
        let source = rng.random_range(0..nodes);
        let r = shortest_paths_from(&g, source, &AdditiveScalar, &SolverConfig::certify()).unwrap();
        let d = dijkstra(&w, source);
        for (t, want) in d.iter().enumerate() {
            assert!((r.path_to(t).unwrap().cost - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn pruned_branches_never_hide_a_better_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut branches = 0;
    for _ in 0..12 {
        let nodes = rng.random_range(5..=7);
        let g = synth::random_graph(nodes, 3, 3.0, &mut rng).unwrap();
        let r = shortest_paths_from(&g, 0, &TotalEntropy, &SolverConfig::certify().with_trace()).unwrap();
        let trace = r.trace.as_ref().unwrap();
        assert_eq!(trace.pruned.len() as u64, r.stats.pruned_count);
        for b in &trace.pruned {
            branches += 1;
            let best = r.path_to(b.target).unwrap().cost;
            let last = *b.prefix.last().unwrap();
            // every completion of the prefix through at least one more edge
            enumerate_simple_paths(nodes, last, b.target, 1, nodes, &mut |rest| {
                if rest[1..].iter().any(|n| b.prefix.contains(n)) {
                    return Ok(());
                }
                let mut full = b.prefix.clone();
                full.extend_from_slice(&rest[1..]);
                let c = compose_path(&g, &full, &TotalEntropy)?.cost;
                assert!(c >= best - 1e-9, "pruned {full:?} costs {c} < {best}");
                Ok(())
            })
            .unwrap();
        }
    }
    assert!(branches > 0);
}

#[test]
fn a_suboptimal_subpath_does_not_mislead_the_search() {
    // Look for an optimal path s..p..t whose prefix s..p is not the best
    // path to p, then check the solver still finds it.
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut found = false;
    for _ in 0..400 {
        let g = synth::random_graph(6, 3, 4.0, &mut rng).unwrap();
        let r = shortest_paths_from(&g, 0, &TotalEntropy, &SolverConfig::certify()).unwrap();
        for t in 1..6 {
            let p = r.path_to(t).unwrap();
            let oracle = brute_force_oracle(&g, 0, t, &TotalEntropy, None).unwrap();
            assert_eq!(p.nodes, oracle.nodes);
            for cut in 2..p.nodes.len() - 1 {
                let mid = p.nodes[cut - 1];
                let prefix = compose_path(&g, &p.nodes[..cut], &TotalEntropy).unwrap();
                let best_mid = brute_force_oracle(&g, 0, mid, &TotalEntropy, None).unwrap();
                if prefix.cost > best_mid.cost + 1e-9 {
                    found = true;
                }
            }
        }
        if found {
            break;
        }
    }
    assert!(found, "no instance without optimal substructure found");
}

#[test]
fn all_pairs_is_symmetric_with_zero_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let g = synth::random_graph(7, 4, 3.0, &mut rng).unwrap();
    let ap = all_pairs(&g, &TotalEntropy, &SolverConfig::certify()).unwrap();
    assert!(ap.certified);
    for x in 0..7 {
        assert_eq!(ap.cost(x, x), 0.0);
        for y in 0..7 {
            // the reverse direction solved independently
            let (back, _) = shortest_path(&g, y, x, &TotalEntropy, &SolverConfig::certify()).unwrap();
            assert!((ap.cost(x, y) - back.cost).abs() <= 1e-9);
            assert!((ap.cost(x, y) - ap.cost(y, x)).abs() <= 1e-9);
        }
    }
}

/// A cost that is not transpose-symmetric, to exercise the two-direction path.
struct RowEntropy;

impl PathCost for RowEntropy {
    fn name(&self) -> &str {
        "row-entropy"
    }

    fn evaluate(&self, m: &EdgeMatrix) -> mvsp::Result<f64> {
        let first: Vec<f64> = m.rows()[0].clone();
        Ok(first
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.ln())
            .sum::<f64>()
            .max(0.0))
    }
}

#[test]
fn asymmetric_costs_are_solved_in_both_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let g = synth::random_graph(5, 3, 3.0, &mut rng).unwrap();
    let ap = all_pairs(&g, &RowEntropy, &SolverConfig::certify()).unwrap();
    for x in 0..5 {
        for y in 0..5 {
            let want = brute_force_oracle(&g, x, y, &RowEntropy, None).unwrap();
            assert!((ap.cost(x, y) - want.cost).abs() <= 1e-9);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let g = synth::random_graph(9, 5, 2.0, &mut rng).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let ap = all_pairs(&g, &TotalEntropy, &SolverConfig::capped(4)).unwrap();
            serde_json::to_string(&ap.to_json(&g, false)).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(5));
}

#[test]
fn json_report_lists_every_target() {
    let g = pruning_example();
    let s = g.node_index("s").unwrap();
    let r = shortest_paths_from(&g, s, &AdditiveScalar, &SolverConfig::certify()).unwrap();
    let v = r.to_json(&g, false);
    assert_eq!(v["source"], "s");
    assert_eq!(v["targets"].as_array().unwrap().len(), 3);
    assert_eq!(v["stats"]["wallTimeSeconds"], 0.0);
    let t = v["targets"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["target"] == "t")
        .unwrap();
    assert_eq!(t["path"], serde_json::json!(["s", "b", "a", "t"]));
}
