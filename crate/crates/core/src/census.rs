use crate::error::Result;
use crate::graph::{VertexId, WeightedGraph};
use crate::params::{checked_pow, exact_div, to_u64, ModelParams};

/// Exact counts of a graph at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub vertices: u64,
    pub edges: u64,
    pub triangles: u64,
    pub total_weight: u64,
}

/// Measures a graph. Triangles are counted once each.
pub fn census(graph: &WeightedGraph) -> Census {
    let mut triangles = 0u64;
    for_each_triangle(graph, |_, _, _| triangles += 1);
    Census {
        vertices: graph.vertex_count() as u64,
        edges: graph.edge_count() as u64,
        triangles,
        total_weight: graph.total_weight(),
    }
}

/// Closed-form census at `params`, evaluated in exact integer arithmetic.
///
/// `N = (6 (d+4)^n + 3d + 3)/(d+3)`, `E = (9 (d+4)^n + 3d)/(d+3)`,
/// `T = (3 (d+4)^n + d)/(d+3)`, `W = 3 (d+4)^n`.
pub fn expected_census(params: ModelParams) -> Result<Census> {
    let d = params.delta() as u128;
    let p = checked_pow(params.delta() + 4, params.levels(), "(delta+4)^n")? as u128;
    let vertices = exact_div(6 * p + 3 * d + 3, d + 3, "vertex count")?;
    let edges = exact_div(9 * p + 3 * d, d + 3, "edge count")?;
    let triangles = exact_div(3 * p + d, d + 3, "triangle count")?;
    Ok(Census {
        vertices: to_u64(vertices, "vertex count")?,
        edges: to_u64(edges, "edge count")?,
        triangles: to_u64(triangles, "triangle count")?,
        total_weight: to_u64(3 * p, "total weight")?,
    })
}

/// Calls `visit(a, b, c)` exactly once per triangle.
///
/// Edges are oriented from lower to higher (degree, id) rank so every
/// vertex only scans its few higher-ranked neighbors.
pub fn for_each_triangle<F>(graph: &WeightedGraph, mut visit: F)
where
    F: FnMut(VertexId, VertexId, VertexId),
{
    let n = graph.vertex_count();
    let ranks_above = |u: VertexId, v: VertexId| {
        (graph.degree(v), v) > (graph.degree(u), u)
    };
    let mut offsets = Vec::with_capacity(n + 1);
    let mut forward: Vec<VertexId> = Vec::with_capacity(graph.edge_count());
    offsets.push(0usize);
    for u in graph.vertices() {
        forward.extend(graph.neighbor_ids(u).iter().copied().filter(|&v| ranks_above(u, v)));
        offsets.push(forward.len());
    }
    let mut mark = vec![false; n];
    for u in 0..n {
        let out_u = &forward[offsets[u]..offsets[u + 1]];
        for &v in out_u {
            mark[v as usize] = true;
        }
        for &v in out_u {
            for &w in &forward[offsets[v as usize]..offsets[v as usize + 1]] {
                if mark[w as usize] {
                    visit(u as VertexId, v, w);
                }
            }
        }
        for &v in out_u {
            mark[v as usize] = false;
        }
    }
}

/// Number of triangles through each vertex.
pub fn vertex_triangles(graph: &WeightedGraph) -> Vec<u64> {
    let mut counts = vec![0u64; graph.vertex_count()];
    for_each_triangle(graph, |a, b, c| {
        counts[a as usize] += 1;
        counts[b as usize] += 1;
        counts[c as usize] += 1;
    });
    counts
}
