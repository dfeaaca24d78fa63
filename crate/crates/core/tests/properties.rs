//! Randomized invariant checks that cut across module boundaries: metric
//! symmetries, distance-matrix axioms, round trips, and the monotone-descent
//! guarantees of the iterative algorithms.

use proptest::prelude::*;
use rand::seq::SliceRandom;

use cq_core::clustcmp::{
    adjusted_mutual_information, adjusted_rand_index, contingency, fowlkes_mallows,
    homogeneity_completeness, rand_index,
};
use cq_core::dist::bfs_all_pairs;
use cq_core::graph::{ClusterLabeling, Graph};
use cq_core::layouts::layout_stress_traced;
use cq_core::seed::rng_from;
use cq_core::{
    compute_layout, cq_scores, io, kmeans, score_layout, KMeansConfig64, Layout64, LayoutConfig64,
    LayoutMethod, Point64,
};

/// A connected undirected graph: a path through all vertices plus a random
/// subset of the remaining pairs.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.2), n * (n - 1) / 2).prop_map(
            move |mask| {
                let mut edges: Vec<(u32, u32)> =
                    (1..n as u32).map(|v| (v - 1, v)).collect();
                let mut at = 0;
                for u in 0..n as u32 {
                    for v in u + 1..n as u32 {
                        if mask[at] {
                            edges.push((u, v));
                        }
                        at += 1;
                    }
                }
                Graph::new(n, edges).expect("edges stay in range")
            },
        )
    })
}

fn labeling(n: usize) -> impl Strategy<Value = ClusterLabeling> {
    proptest::collection::vec(0u64..6, n)
        .prop_map(|raw| ClusterLabeling::from_assignments(&raw).expect("non-empty"))
}

fn labeling_pair() -> impl Strategy<Value = (ClusterLabeling, ClusterLabeling)> {
    (4usize..=40).prop_flat_map(|n| (labeling(n), labeling(n)))
}

/// Rename the clusters of `l` by a random permutation; the partition itself
/// is unchanged.
fn permute_labels(l: &ClusterLabeling, seed: u64) -> ClusterLabeling {
    let mut perm: Vec<u64> = (0..l.cluster_count() as u64).collect();
    perm.shuffle(&mut rng_from(seed, 0x9e77));
    let renamed: Vec<u64> = l.labels().iter().map(|&c| perm[c as usize]).collect();
    ClusterLabeling::from_assignments(&renamed).expect("same coverage")
}

/// All six comparison values of a labeling pair, in a fixed order.
fn all_metrics(a: &ClusterLabeling, b: &ClusterLabeling) -> [f64; 6] {
    let t = contingency(a, b).expect("equal lengths");
    let (hom, cmp) = homogeneity_completeness(&t);
    [
        rand_index(&t).expect("n >= 2"),
        adjusted_rand_index(&t).expect("n >= 2"),
        fowlkes_mallows(&t).expect("n >= 2"),
        adjusted_mutual_information(&t),
        hom,
        cmp,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Cluster ids are arbitrary names: renaming them on either side must
    /// not move any score.
    #[test]
    fn metrics_ignore_cluster_names(
        (a, b) in labeling_pair(),
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
    ) {
        let before = all_metrics(&a, &b);
        let after = all_metrics(&permute_labels(&a, seed_a), &permute_labels(&b, seed_b));
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-12, "{before:?} vs {after:?}");
        }
    }

    /// Homogeneity and completeness swap roles when the arguments swap.
    #[test]
    fn homogeneity_mirrors_completeness_under_swap((a, b) in labeling_pair()) {
        let (hom_ab, cmp_ab): (f64, f64) =
            homogeneity_completeness(&contingency(&a, &b).unwrap());
        let (hom_ba, cmp_ba): (f64, f64) =
            homogeneity_completeness(&contingency(&b, &a).unwrap());
        prop_assert!((hom_ab - cmp_ba).abs() <= 1e-12);
        prop_assert!((cmp_ab - hom_ba).abs() <= 1e-12);
    }

    /// Comparing a partition against a renamed copy of itself gives exactly
    /// 1 everywhere, with no floating-point shortfall.
    #[test]
    fn identical_partitions_score_exactly_one(
        n in 2usize..=40,
        raw in proptest::collection::vec(0u64..5, 40),
        seed in any::<u64>(),
    ) {
        let a = ClusterLabeling::from_assignments(&raw[..n]).unwrap();
        let b = permute_labels(&a, seed);
        let report = cq_scores::<f64>(&a, &b).unwrap();
        for (name, value) in report.metric_values() {
            prop_assert_eq!(value, 1.0, "{} fell short of 1", name);
        }
    }

    /// Every score is bounded above by 1; the non-adjusted ones are also
    /// non-negative.
    #[test]
    fn metrics_respect_their_ranges((a, b) in labeling_pair()) {
        let [ri, ari, fmi, ami, hom, cmp] = all_metrics(&a, &b);
        let eps = 1e-12;
        for v in [ri, ari, fmi, ami, hom, cmp] {
            prop_assert!(v <= 1.0 + eps);
        }
        for v in [ri, fmi, hom, cmp] {
            prop_assert!(v >= -eps);
        }
        for v in [ari, ami] {
            prop_assert!(v >= -1.0 - eps);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Hop distances are a metric: symmetric, zero on the diagonal, and
    /// triangle-inequality consistent.
    #[test]
    fn bfs_distances_form_a_metric(g in connected_graph(16)) {
        let d = bfs_all_pairs(&g).unwrap();
        let n = d.n();
        for i in 0..n {
            prop_assert_eq!(d.get(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..n {
                    prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j));
                }
            }
        }
    }

    /// Serializing a graph and parsing it back is the identity, and the
    /// serialized form is canonical.
    #[test]
    fn edge_lists_round_trip(g in connected_graph(20)) {
        let text = io::write_edge_list(&g);
        let doc = io::parse_edge_list(&text).unwrap();
        prop_assert_eq!(&doc.graph, &g);
        prop_assert_eq!(io::write_edge_list(&doc.graph), text);
        prop_assert_eq!(doc.dropped(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The same seed and configuration reproduce every built-in layout
    /// bit for bit.
    #[test]
    fn builtin_layouts_are_seed_deterministic(
        g in connected_graph(12),
        seed in any::<u64>(),
        which in 0usize..6,
    ) {
        let cfg = LayoutConfig64 { seed, max_iterations: 60, ..LayoutConfig64::default() };
        let method = LayoutMethod::ALL[which];
        let first = compute_layout(method, &g, &cfg).unwrap();
        let second = compute_layout(method, &g, &cfg).unwrap();
        prop_assert_eq!(first, second);
    }

    /// Every Lloyd iteration of the winning k-means restart lowers (or
    /// keeps) the objective.
    #[test]
    fn kmeans_objective_descends(
        coords in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 6..48),
        k in 1usize..=4,
        seed in any::<u64>(),
    ) {
        // Nudge each point by an index-scaled offset so all are distinct and
        // k never exceeds the number of distinct positions.
        let points: Vec<Point64> = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Point64::new(x + i as f64 * 1e-7, y))
            .collect();
        let layout = Layout64::new(points).unwrap();
        let cfg = KMeansConfig64 { restarts: 2, ..KMeansConfig64::new(k) };
        let result = kmeans(&layout, &cfg, &mut rng_from(seed, 0)).unwrap();
        prop_assert!(!result.objective_trace.is_empty());
        for w in result.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "trace rose: {w:?}");
        }
        let last = *result.objective_trace.last().unwrap();
        prop_assert!((result.objective - last).abs() <= 1e-9 * (1.0 + last.abs()));
    }

    /// Stress majorization never increases the stress, sweep over sweep.
    #[test]
    fn stress_majorization_descends(g in connected_graph(12), seed in any::<u64>()) {
        let d = bfs_all_pairs(&g).unwrap();
        let cfg = LayoutConfig64 { seed, max_iterations: 120, ..LayoutConfig64::default() };
        let (_, trace) = layout_stress_traced(&g, &d, &cfg, &mut rng_from(seed, 1)).unwrap();
        prop_assert!(!trace.is_empty());
        for w in trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "stress rose: {w:?}");
        }
    }

    /// Moving, mirroring, quarter-turning, or rescaling a drawing must not
    /// move any score a single bit: the k-means tolerance is relative to the
    /// bounding box and every other quantity is position-difference based.
    /// Quarter turns, axis mirrors, and power-of-two scales are exact in
    /// floating point, so the whole pipeline is exactly equivariant; the
    /// integer translation is inexact but orders of magnitude below any
    /// assignment margin.
    #[test]
    fn pipeline_scores_are_similarity_invariant(
        (g, truth) in connected_graph(24).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), labeling(n))
        }),
        seed in any::<u64>(),
        quarter_turns in 0u8..4,
        mirror in any::<bool>(),
        scale_exp in -2i32..=3,
        shift in (-8i32..=8, -8i32..=8),
    ) {
        let layout = compute_layout(
            LayoutMethod::Random,
            &g,
            &LayoutConfig64 { seed, ..LayoutConfig64::default() },
        ).unwrap();
        let scale = 2.0f64.powi(scale_exp);
        let moved = Layout64::new(
            layout
                .positions()
                .iter()
                .map(|&p| {
                    let mut q = p;
                    for _ in 0..quarter_turns {
                        q = Point64::new(-q.y, q.x);
                    }
                    if mirror {
                        q = Point64::new(-q.x, q.y);
                    }
                    Point64::new(
                        scale * q.x + shift.0 as f64,
                        scale * q.y + shift.1 as f64,
                    )
                })
                .collect(),
        ).unwrap();
        let cfg = KMeansConfig64 {
            restarts: 2,
            seed: seed ^ 0xC3,
            ..KMeansConfig64::new(truth.cluster_count())
        };
        let before = score_layout(&truth, &layout, &cfg).unwrap();
        let after = score_layout(&truth, &moved, &cfg).unwrap();
        for ((name, x), (_, y)) in before.metric_values().iter().zip(after.metric_values()) {
            prop_assert_eq!(*x, y, "{} moved under a similarity transform", name);
        }
    }
}
