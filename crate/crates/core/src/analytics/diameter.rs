use std::collections::VecDeque;

use rayon::prelude::*;

use crate::graph::{VertexId, WeightedGraph};

fn eccentricity(graph: &WeightedGraph, source: VertexId, dist: &mut [u32]) -> u32 {
    dist.fill(u32::MAX);
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        far = far.max(du);
        for &v in graph.neighbor_ids(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    far
}

/// Hop-count diameter by breadth-first search from every vertex. Sources
/// are spread over the rayon pool; the maximum is scheduling-independent.
pub fn diameter(graph: &WeightedGraph) -> u32 {
    let n = graph.vertex_count();
    (0..n as VertexId)
        .into_par_iter()
        .map_init(|| vec![u32::MAX; n], |dist, s| eccentricity(graph, s, dist))
        .max()
        .unwrap_or(0)
}

/// `2n + 1` for every level (the seed triangle has diameter 1).
pub fn diameter_closed(n: u32) -> u32 {
    2 * n + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use crate::params::ModelParams;

    #[test]
    fn seed_and_small_levels() {
        assert_eq!(diameter(&WeightedGraph::seed_triangle()), 1);
        assert_eq!(diameter_closed(0), 1);
        for delta in 1..=2 {
            for n in 1..=4 {
                let g = generate(ModelParams::new(delta, n).unwrap()).unwrap();
                assert_eq!(diameter(&g), diameter_closed(n));
            }
        }
    }

    #[test]
    fn path_graph() {
        let path = WeightedGraph::from_edges(4, &[(0, 1, 1), (1, 2, 3), (2, 3, 1)], vec![0; 4], 0)
            .unwrap();
        assert_eq!(diameter(&path), 3);
    }
}
