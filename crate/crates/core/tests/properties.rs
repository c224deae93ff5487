use num_bigint::BigUint;
use proptest::prelude::*;

use corona_core::analytics::{
    closed_degree, closed_strength, degree_classes, local_clustering, weighted_local_clustering,
};
use corona_core::dynamics::{
    hitting_time_closed, hitting_time_monte_carlo, hitting_time_recursive, tree_count_closed,
    tree_count_kirchhoff, tree_count_triangles,
};
use corona_core::output::fmt_sig;
use corona_core::spectra::{child_eigenvalues, parent_of, transition_spectrum};
use corona_core::{
    census, expected_census, extended_corona, generate, ModelParams, Rational, WeightedGraph,
};

fn params(delta: u64, n: u32) -> ModelParams {
    ModelParams::new(delta, n).unwrap()
}

/// Random tree on `n` vertices: vertex `i > 0` hangs off `parents[i-1] % i`.
fn random_tree(parents: &[usize], weights: &[u64]) -> (usize, Vec<(u32, u32, u64)>) {
    let n = parents.len() + 1;
    let edges = parents
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&p, &w))| ((p % (i + 1)) as u32, (i + 1) as u32, w))
        .collect();
    (n, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_census_divides_exactly(delta in 1u64..2000, n in 0u32..5) {
        let c = expected_census(params(delta, n)).unwrap();
        prop_assert!(2 * c.edges >= 3 * c.triangles);
        prop_assert!(c.total_weight >= c.edges);
        // every triangle closes exactly one independent cycle
        prop_assert_eq!(c.edges + 1, c.vertices + c.triangles);
    }

    #[test]
    fn class_tables_balance(delta in 1u64..500, n in 0u32..6) {
        prop_assert!(degree_classes(params(delta, n)).unwrap().check_balances().is_ok());
    }

    #[test]
    fn new_edges_are_one_and_a_half_new_vertices(delta in 1u64..500, n in 1u32..6) {
        let now = expected_census(params(delta, n)).unwrap();
        let before = expected_census(params(delta, n - 1)).unwrap();
        prop_assert_eq!(2 * (now.edges - before.edges), 3 * (now.vertices - before.vertices));
    }

    #[test]
    fn degree_is_integral_and_grows(delta in 1u64..200, n in 0u32..6, age in 0u32..6) {
        prop_assume!(age <= n);
        let born = n - age;
        let k = closed_degree(delta, n, born).unwrap();
        let s = closed_strength(delta, n, born).unwrap();
        prop_assert!(k <= s);
        prop_assert_eq!(k * (delta + 1), s + 2 * delta);
    }

    #[test]
    fn children_solve_the_quadratic(parent in -1.0f64..=1.0, delta in 1u64..60) {
        let (a, b) = child_eigenvalues(parent, delta).unwrap();
        let d = delta as f64;
        prop_assert!(a <= b);
        for x in [a, b] {
            let q = 2.0 * (d + 2.0) * x * x - ((d + 2.0) + 2.0 * (d + 1.0) * parent) * x
                + ((d + 1.0) * parent - 1.0);
            prop_assert!(q.abs() <= 1e-12, "residual {}", q);
            prop_assert!((-1.0..=1.0).contains(&x));
            prop_assert!((x - 0.5).abs() > 1e-9);
            prop_assert!((parent_of(x, delta) - parent).abs() <= 1e-9);
        }
    }

    #[test]
    fn hitting_closed_matches_recursion(delta in 1u64..100, n in 0u32..9) {
        let (c, r) = (hitting_time_closed(delta, n), hitting_time_recursive(delta, n));
        prop_assert!((c - r).abs() <= 1e-12 * r);
    }

    #[test]
    fn tree_routes_agree(delta in 1u64..100, n in 0u32..7) {
        let closed = tree_count_closed(params(delta, n)).unwrap();
        prop_assert_eq!(&closed, &tree_count_triangles(params(delta, n)).unwrap());
    }

    #[test]
    fn kirchhoff_on_weighted_trees(
        (parents, weights) in (1usize..12).prop_flat_map(|m| (
            prop::collection::vec(any::<usize>(), m),
            prop::collection::vec(1u64..20, m),
        ))
    ) {
        let (n, edges) = random_tree(&parents, &weights);
        let g = WeightedGraph::from_edges(n, &edges, vec![0; n], 0).unwrap();
        let product: BigUint = weights.iter().map(|&w| BigUint::from(w)).product();
        prop_assert_eq!(tree_count_kirchhoff(&g).unwrap(), product);
    }

    #[test]
    fn kirchhoff_on_weighted_cycles(weights in prop::collection::vec(1u64..30, 3..10)) {
        let n = weights.len();
        let edges: Vec<(u32, u32, u64)> = (0..n)
            .map(|i| {
                let (u, v) = (i as u32, ((i + 1) % n) as u32);
                (u.min(v), u.max(v), weights[i])
            })
            .collect();
        let g = WeightedGraph::from_edges(n, &edges, vec![0; n], 0).unwrap();
        // spanning trees of a cycle drop exactly one edge
        let total: BigUint = (0..n)
            .map(|skip| {
                weights
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &w)| BigUint::from(w))
                    .product::<BigUint>()
            })
            .sum();
        prop_assert_eq!(tree_count_kirchhoff(&g).unwrap(), total);
    }

    #[test]
    fn significant_digits_round_trip(x in prop::num::f64::NORMAL, digits in 1usize..=17) {
        let text = fmt_sig(x, digits);
        let back: f64 = text.parse().unwrap();
        let tol = 10f64.powi(1 - digits as i32);
        prop_assert!(((back - x) / x).abs() <= tol, "{} -> {}", x, text);
        if digits == 17 {
            prop_assert_eq!(back, x);
        }
    }

    #[test]
    fn simulation_is_reproducible(seed in any::<u64>(), start in 0u32..3) {
        let g = WeightedGraph::seed_triangle();
        let a = hitting_time_monte_carlo(&g, start, 500, seed).unwrap();
        let b = hitting_time_monte_carlo(&g, start, 500, seed).unwrap();
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_graphs_keep_their_invariants(delta in 1u64..12, n in 0u32..4) {
        let g = generate(params(delta, n)).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert!(g.strengths().iter().all(|s| s % 2 == 0));
        prop_assert_eq!(census(&g), expected_census(params(delta, n)).unwrap());
        for v in g.vertices() {
            let k = g.degree(v) as u128;
            let expect = Rational::new(1, k - 1);
            prop_assert_eq!(local_clustering(&g, v).unwrap(), expect);
            prop_assert_eq!(weighted_local_clustering(&g, v).unwrap(), expect);
        }
    }

    #[test]
    fn spectrum_sums_to_vertex_count(delta in 1u64..40, n in 0u32..6) {
        let spec = transition_spectrum(delta, n).unwrap();
        let c = expected_census(params(delta, n)).unwrap();
        prop_assert_eq!(spec.total_multiplicity(), c.vertices);
        prop_assert_eq!(spec.multiplicity_of(1.0), 1);
        prop_assert!(spec.moment(1).abs() <= 1e-9 * c.vertices as f64);
    }

    #[test]
    fn corona_with_weighted_attachment(w in 1u64..9, copies_weight in 1u64..5) {
        // host: a triangle with every weight doubled, so strengths are even
        let host = WeightedGraph::from_edges(
            3,
            &[(0, 1, 2 * copies_weight), (0, 2, 2 * copies_weight), (1, 2, 2 * copies_weight)],
            vec![0; 3],
            0,
        )
        .unwrap();
        let attach = WeightedGraph::from_edges(2, &[(0, 1, w)], vec![0; 2], 0).unwrap();
        let g = extended_corona(&host, &attach).unwrap();
        let copies = 3 * 2 * copies_weight;
        prop_assert_eq!(g.vertex_count() as u64, 3 + 2 * copies);
        prop_assert_eq!(g.edge_count() as u64, 3 + 3 * copies);
        prop_assert_eq!(g.total_weight(), 3 * 2 * copies_weight + copies * (w + 2));
        prop_assert!(g.births()[3..].iter().all(|&b| b == 1));
    }
}
