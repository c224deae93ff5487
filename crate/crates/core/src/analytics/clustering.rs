use crate::census::for_each_triangle;
use crate::error::{CoronaError, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::Rational;

fn require_degree(graph: &WeightedGraph, v: VertexId) -> Result<u128> {
    let k = graph.degree(v) as u128;
    if k < 2 {
        return Err(CoronaError::Undefined(format!(
            "clustering of vertex {v} with degree {k}"
        )));
    }
    Ok(k)
}

/// Sorted-merge walk over the common neighbors of `v` and `j`, yielding the
/// weight of `{v, h}` for each common neighbor `h`.
fn common_weights<'a>(
    graph: &'a WeightedGraph,
    v: VertexId,
    j: VertexId,
) -> impl Iterator<Item = u64> + 'a {
    let (a_ids, a_w) = (graph.neighbor_ids(v), graph.neighbor_weights(v));
    let b_ids = graph.neighbor_ids(j);
    let (mut x, mut y) = (0, 0);
    std::iter::from_fn(move || {
        while x < a_ids.len() && y < b_ids.len() {
            match a_ids[x].cmp(&b_ids[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    let w = a_w[x];
                    x += 1;
                    y += 1;
                    return Some(w);
                }
            }
        }
        None
    })
}

/// `2 t_v / (k_v (k_v - 1))` with the triangle count `t_v` taken exactly.
pub fn local_clustering(graph: &WeightedGraph, v: VertexId) -> Result<Rational> {
    let k = require_degree(graph, v)?;
    let ordered: u128 = graph
        .neighbor_ids(v)
        .iter()
        .map(|&j| common_weights(graph, v, j).count() as u128)
        .sum();
    // `ordered` counts each triangle twice, so it already equals 2 t_v.
    Ok(Rational::new(ordered, k * (k - 1)))
}

/// Weighted clustering: `1/(s_v (k_v-1)) * sum_{j,h} (w_vj + w_vh)/2`
/// over ordered neighbor pairs `(j, h)` that are themselves adjacent.
pub fn weighted_local_clustering(graph: &WeightedGraph, v: VertexId) -> Result<Rational> {
    let k = require_degree(graph, v)?;
    let mut doubled: u128 = 0;
    for (j, w_vj) in graph.neighbors(v) {
        for w_vh in common_weights(graph, v, j) {
            doubled += w_vj as u128 + w_vh as u128;
        }
    }
    let s = graph.strength(v) as u128;
    Ok(Rational::new(doubled, 2 * s * (k - 1)))
}

/// Plain and weighted clustering of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexClustering {
    pub plain: Rational,
    pub weighted: Rational,
}

/// Both coefficients for every vertex in one triangle sweep. Vertices of
/// degree below 2 get `None`.
pub fn clustering_all(graph: &WeightedGraph) -> Vec<Option<VertexClustering>> {
    let n = graph.vertex_count();
    let mut triangles = vec![0u128; n];
    // sum over unordered triangles of (w_vj + w_vh)
    let mut weighted = vec![0u128; n];
    let w = |a, b| graph.weight(a, b).expect("triangle edge") as u128;
    for_each_triangle(graph, |a, b, c| {
        let (ab, ac, bc) = (w(a, b), w(a, c), w(b, c));
        for (v, sum) in [(a, ab + ac), (b, ab + bc), (c, ac + bc)] {
            triangles[v as usize] += 1;
            weighted[v as usize] += sum;
        }
    });
    graph
        .vertices()
        .map(|v| {
            let k = graph.degree(v) as u128;
            (k >= 2).then(|| {
                let s = graph.strength(v) as u128;
                VertexClustering {
                    plain: Rational::new(2 * triangles[v as usize], k * (k - 1)),
                    weighted: Rational::new(weighted[v as usize], s * (k - 1)),
                }
            })
        })
        .collect()
}

/// Mean local clustering over all vertices; degree < 2 counts as 0.
pub fn global_clustering_empirical(graph: &WeightedGraph) -> f64 {
    if graph.is_empty() {
        return 0.0;
    }
    let sum: f64 = clustering_all(graph)
        .iter()
        .flatten()
        .map(|c| *c.plain.numer() as f64 / *c.plain.denom() as f64)
        .sum();
    sum / graph.vertex_count() as f64
}

/// Closed-form average clustering: class sizes times `1/(k-1)`, where a
/// class born at `i >= 1` has `6 (d+4)^(i-1)` members and the seed class 3.
///
/// The reference statement weights class `i` by `6 (d+4)^i`, which gives
/// values above 1 (see [`global_clustering_printed`]); this uses the class
/// size instead, which matches the per-vertex average.
pub fn global_clustering_closed(delta: u64, n: u32) -> f64 {
    let d = delta as f64;
    let inv_k_minus_one =
        |age: u32| (d + 1.0) / (2.0 * (d + 2.0).powi(age as i32) + d - 1.0);
    let vertices = (6.0 * (d + 4.0).powi(n as i32) + 3.0 * d + 3.0) / (d + 3.0);
    let mut sum = 3.0 * inv_k_minus_one(n);
    for i in 1..=n {
        sum += 6.0 * (d + 4.0).powi(i as i32 - 1) * inv_k_minus_one(n - i);
    }
    sum / vertices
}

/// The average clustering expression exactly as originally stated, with
/// class weight `6 (d+4)^i`. Kept for the verification report.
pub fn global_clustering_printed(delta: u64, n: u32) -> f64 {
    let d = delta as f64;
    let mut sum = (3.0 * d + 3.0) / (2.0 * (d + 2.0).powi(n as i32) + d - 1.0);
    for i in 1..=n {
        sum += 6.0 * (d + 4.0).powi(i as i32) * (d + 1.0)
            / (2.0 * (d + 2.0).powi((n - i) as i32) + d - 1.0);
    }
    (d + 3.0) / (6.0 * (d + 4.0).powi(n as i32) + 3.0 * d + 3.0) * sum
}
