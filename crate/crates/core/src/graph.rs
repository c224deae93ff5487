//! Weighted graph storage, the extended corona operator, weight
//! reinforcement, and the level-by-level generator.

use std::collections::VecDeque;

use crate::census::expected_census;
use crate::error::{CoronaError, Result};
use crate::params::ModelParams;

pub type VertexId = u32;

/// Undirected, simple, integer-weighted graph in compressed sparse row form.
///
/// Neighbor lists are sorted by vertex id. Every vertex records the growth
/// iteration at which it was created, and the graph records the iteration it
/// stands at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    level: u32,
    birth: Vec<u32>,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    weights: Vec<u64>,
    strengths: Vec<u64>,
    total_weight: u64,
}

impl WeightedGraph {
    /// Builds a graph from an edge list. Endpoint order inside a tuple does
    /// not matter; self-loops, parallel edges and zero weights are rejected.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(VertexId, VertexId, u64)],
        birth: Vec<u32>,
        level: u32,
    ) -> Result<Self> {
        if birth.len() != vertex_count {
            return Err(CoronaError::InvalidGraph(format!(
                "birth vector has {} entries for {vertex_count} vertices",
                birth.len()
            )));
        }
        if vertex_count > VertexId::MAX as usize {
            return Err(CoronaError::TooLarge {
                what: "vertex count",
                size: vertex_count,
                limit: VertexId::MAX as usize,
            });
        }
        let mut degree = vec![0usize; vertex_count];
        for &(u, v, w) in edges {
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(CoronaError::InvalidGraph(format!(
                    "edge ({u}, {v}) references a missing vertex"
                )));
            }
            if u == v {
                return Err(CoronaError::InvalidGraph(format!("self-loop at {u}")));
            }
            if w == 0 {
                return Err(CoronaError::InvalidGraph(format!(
                    "edge ({u}, {v}) has zero weight"
                )));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..vertex_count].to_vec();
        let mut slots = vec![(0 as VertexId, 0u64); 2 * edges.len()];
        for &(u, v, w) in edges {
            slots[cursor[u as usize]] = (v, w);
            cursor[u as usize] += 1;
            slots[cursor[v as usize]] = (u, w);
            cursor[v as usize] += 1;
        }
        for v in 0..vertex_count {
            let list = &mut slots[offsets[v]..offsets[v + 1]];
            list.sort_unstable_by_key(|&(x, _)| x);
            if list.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(CoronaError::InvalidGraph(format!(
                    "parallel edges at vertex {v}"
                )));
            }
        }
        let (neighbors, weights) = slots.into_iter().unzip();
        Self::from_csr(level, birth, offsets, neighbors, weights)
    }

    fn from_csr(
        level: u32,
        birth: Vec<u32>,
        offsets: Vec<usize>,
        neighbors: Vec<VertexId>,
        weights: Vec<u64>,
    ) -> Result<Self> {
        let mut strengths = Vec::with_capacity(birth.len());
        let mut twice_total: u128 = 0;
        for v in 0..birth.len() {
            let mut s: u64 = 0;
            for &w in &weights[offsets[v]..offsets[v + 1]] {
                s = s.checked_add(w).ok_or(CoronaError::Overflow("vertex strength"))?;
            }
            twice_total += s as u128;
            strengths.push(s);
        }
        let total_weight =
            u64::try_from(twice_total / 2).map_err(|_| CoronaError::Overflow("total weight"))?;
        Ok(WeightedGraph {
            level,
            birth,
            offsets,
            neighbors,
            weights,
            strengths,
            total_weight,
        })
    }

    /// The initial graph: a unit-weight triangle at level 0.
    pub fn seed_triangle() -> Self {
        Self::from_edges(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)], vec![0; 3], 0)
            .expect("triangle is a valid graph")
    }

    /// A single unit-weight edge.
    pub fn unit_edge() -> Self {
        Self::from_edges(2, &[(0, 1, 1)], vec![0; 2], 0).expect("K2 is a valid graph")
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.birth.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.birth.is_empty()
    }

    pub fn birth(&self, v: VertexId) -> u32 {
        self.birth[v as usize]
    }

    pub fn births(&self) -> &[u32] {
        &self.birth
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn strength(&self, v: VertexId) -> u64 {
        self.strengths[v as usize]
    }

    pub fn strengths(&self) -> &[u64] {
        &self.strengths
    }

    /// Sum of all edge weights (half the strength sum).
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Sorted neighbor ids of `v`.
    pub fn neighbor_ids(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// Weights aligned with [`neighbor_ids`](Self::neighbor_ids).
    pub fn neighbor_weights(&self, v: VertexId) -> &[u64] {
        &self.weights[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.neighbor_ids(v)
            .iter()
            .copied()
            .zip(self.neighbor_weights(v).iter().copied())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertex_count() as VertexId
    }

    /// Weight of edge `{u, v}`, if present.
    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let ids = self.neighbor_ids(u);
        ids.binary_search(&v)
            .ok()
            .map(|i| self.neighbor_weights(u)[i])
    }

    /// Edges as `(u, v, w)` with `u < v`, in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, u64)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0 as VertexId]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbor_ids(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == n
    }

    /// Checks the structural invariants: connected and every strength even.
    pub fn validate(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(CoronaError::InvalidGraph("graph is disconnected".into()));
        }
        if let Some(v) = self.vertices().find(|&v| !self.strength(v).is_multiple_of(2)) {
            return Err(CoronaError::InvalidGraph(format!(
                "vertex {v} has odd strength {}",
                self.strength(v)
            )));
        }
        Ok(())
    }
}

/// Extended corona product: every vertex `i` of `host` with strength `s_i`
/// receives `s_i / 2` fresh copies of `attach`, and each copy vertex is joined
/// to `i` by a unit-weight edge.
///
/// New vertices are numbered after the host's, ordered by host vertex id,
/// then copy index, then the vertex id inside `attach`. They carry birth
/// `host.level() + 1`, which is also the level of the result. Weights inside
/// the copies are taken from `attach` as-is.
pub fn extended_corona(host: &WeightedGraph, attach: &WeightedGraph) -> Result<WeightedGraph> {
    if attach.is_empty() {
        return Err(CoronaError::Precondition(
            "attached graph must have at least one vertex".into(),
        ));
    }
    if !attach.is_connected() {
        return Err(CoronaError::Precondition(
            "attached graph must be connected".into(),
        ));
    }
    if let Some(v) = host.vertices().find(|&v| !host.strength(v).is_multiple_of(2)) {
        return Err(CoronaError::Precondition(format!(
            "host vertex {v} has odd strength {}",
            host.strength(v)
        )));
    }

    let n1 = host.vertex_count();
    let n2 = attach.vertex_count();
    let copies: Vec<usize> = host.strengths.iter().map(|&s| (s / 2) as usize).collect();
    let added = copies
        .iter()
        .try_fold(0usize, |acc, &c| acc.checked_add(c.checked_mul(n2)?))
        .ok_or(CoronaError::Overflow("corona vertex count"))?;
    let total = n1
        .checked_add(added)
        .ok_or(CoronaError::Overflow("corona vertex count"))?;
    if total > VertexId::MAX as usize {
        return Err(CoronaError::TooLarge {
            what: "vertex count",
            size: total,
            limit: VertexId::MAX as usize,
        });
    }
    let new_level = host.level + 1;

    let attach_slots = attach.neighbors.len();
    let slot_count = host.neighbors.len() + 2 * added + copies.iter().sum::<usize>() * attach_slots;
    let mut offsets = Vec::with_capacity(total + 1);
    let mut neighbors = Vec::with_capacity(slot_count);
    let mut weights = Vec::with_capacity(slot_count);
    offsets.push(0);

    // Host vertices keep their edges and gain links to their own copies.
    let mut next_new = n1;
    for v in host.vertices() {
        neighbors.extend_from_slice(host.neighbor_ids(v));
        weights.extend_from_slice(host.neighbor_weights(v));
        let fresh = copies[v as usize] * n2;
        neighbors.extend((next_new..next_new + fresh).map(|x| x as VertexId));
        weights.extend(std::iter::repeat_n(1, fresh));
        next_new += fresh;
        offsets.push(neighbors.len());
    }

    // Copy vertices: the host first (smallest id), then the copy's own edges.
    let mut base = n1;
    for v in host.vertices() {
        for _ in 0..copies[v as usize] {
            for t in attach.vertices() {
                neighbors.push(v);
                weights.push(1);
                neighbors.extend(attach.neighbor_ids(t).iter().map(|&x| (base + x as usize) as VertexId));
                weights.extend_from_slice(attach.neighbor_weights(t));
                offsets.push(neighbors.len());
            }
            base += n2;
        }
    }

    let mut birth = Vec::with_capacity(total);
    birth.extend_from_slice(&host.birth);
    birth.resize(total, new_level);
    WeightedGraph::from_csr(new_level, birth, offsets, neighbors, weights)
}

/// Multiplies by `1 + delta` the weight of every edge whose endpoints were
/// both born before iteration `born_before`. Other edges are unchanged.
pub fn reinforce_weights(
    mut graph: WeightedGraph,
    delta: u64,
    born_before: u32,
) -> Result<WeightedGraph> {
    let factor = delta
        .checked_add(1)
        .ok_or(CoronaError::Overflow("reinforcement factor"))?;
    let mut twice_total: u128 = 0;
    for u in 0..graph.vertex_count() {
        let (lo, hi) = (graph.offsets[u], graph.offsets[u + 1]);
        let mut s: u64 = 0;
        if graph.birth[u] < born_before {
            for slot in lo..hi {
                let v = graph.neighbors[slot] as usize;
                if graph.birth[v] < born_before {
                    graph.weights[slot] = graph.weights[slot]
                        .checked_mul(factor)
                        .ok_or(CoronaError::Overflow("edge weight"))?;
                }
                s = s
                    .checked_add(graph.weights[slot])
                    .ok_or(CoronaError::Overflow("vertex strength"))?;
            }
            graph.strengths[u] = s;
        }
        twice_total += graph.strengths[u] as u128;
    }
    graph.total_weight =
        u64::try_from(twice_total / 2).map_err(|_| CoronaError::Overflow("total weight"))?;
    Ok(graph)
}

/// One growth iteration: corona with a unit edge, then reinforce the edges
/// that existed before the step. Copy counts use the strengths of `graph`.
pub fn evolve(graph: &WeightedGraph, delta: u64) -> Result<WeightedGraph> {
    let grown = extended_corona(graph, &WeightedGraph::unit_edge())?;
    let level = grown.level;
    reinforce_weights(grown, delta, level)
}

/// Builds the graph at `params.levels()` from the seed triangle.
pub fn generate(params: ModelParams) -> Result<WeightedGraph> {
    generate_each(params, |_| {})
}

/// Like [`generate`], calling `visit` on every intermediate level
/// (including level 0 and the final one).
pub fn generate_each<F>(params: ModelParams, mut visit: F) -> Result<WeightedGraph>
where
    F: FnMut(&WeightedGraph),
{
    let expected = expected_census(params)?;
    if expected.vertices > VertexId::MAX as u64 {
        return Err(CoronaError::TooLarge {
            what: "vertex count",
            size: expected.vertices as usize,
            limit: VertexId::MAX as usize,
        });
    }
    let mut graph = WeightedGraph::seed_triangle();
    visit(&graph);
    for _ in 0..params.levels() {
        graph = evolve(&graph, params.delta())?;
        visit(&graph);
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census;

    fn params(delta: u64, levels: u32) -> ModelParams {
        ModelParams::new(delta, levels).unwrap()
    }

    #[test]
    fn seed_triangle_shape() {
        let g = WeightedGraph::seed_triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.level(), 0);
        assert!(g.vertices().all(|v| g.strength(v) == 2 && g.degree(v) == 2));
        assert!(g.vertices().all(|v| g.birth(v) == 0));
        assert!(g.edges().all(|(_, _, w)| w == 1));
        g.validate().unwrap();
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1)], vec![0; 2], 0).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 0)], vec![0; 2], 0).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 1), (1, 0, 2)], vec![0; 2], 0).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1)], vec![0; 2], 0).is_err());
    }

    #[test]
    fn corona_triangle_with_edge() {
        let g = extended_corona(&WeightedGraph::seed_triangle(), &WeightedGraph::unit_edge()).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.level(), 1);
        assert!(g.vertices().skip(3).all(|v| g.birth(v) == 1));
        // seed edges untouched by the corona step itself
        assert_eq!(g.weight(0, 1), Some(1));
        // host 0 owns vertices 3 and 4
        assert_eq!(g.neighbor_ids(0), &[1, 2, 3, 4]);
        assert_eq!(g.neighbor_ids(3), &[0, 4]);
    }

    #[test]
    fn corona_rejects_empty_or_odd() {
        let empty = WeightedGraph::from_edges(0, &[], vec![], 0).unwrap();
        assert!(matches!(
            extended_corona(&WeightedGraph::seed_triangle(), &empty),
            Err(CoronaError::Precondition(_))
        ));
        let path = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)], vec![0; 3], 0).unwrap();
        assert!(matches!(
            extended_corona(&path, &WeightedGraph::unit_edge()),
            Err(CoronaError::Precondition(_))
        ));
        let split = WeightedGraph::from_edges(4, &[(0, 1, 1), (2, 3, 1)], vec![0; 4], 0).unwrap();
        assert!(extended_corona(&WeightedGraph::seed_triangle(), &split).is_err());
    }

    #[test]
    fn corona_copy_count_follows_strength() {
        let w1 = generate(params(1, 1)).unwrap();
        let g = extended_corona(&w1, &WeightedGraph::unit_edge()).unwrap();
        for v in w1.vertices() {
            let fresh = g.degree(v) - w1.degree(v);
            assert_eq!(fresh as u64, w1.strength(v));
        }
        assert_eq!(w1.strength(0), 6);
        assert_eq!(g.degree(0) - w1.degree(0), 6);
        assert_eq!(g.degree(3) - w1.degree(3), 2);
    }

    #[test]
    fn corona_accepts_weighted_attachment() {
        let heavy = WeightedGraph::from_edges(2, &[(0, 1, 5)], vec![0; 2], 0).unwrap();
        let g = extended_corona(&WeightedGraph::seed_triangle(), &heavy).unwrap();
        assert_eq!(g.weight(3, 4), Some(5));
        assert_eq!(g.weight(0, 3), Some(1));
    }

    #[test]
    fn reinforce_examples() {
        let w0 = reinforce_weights(WeightedGraph::seed_triangle(), 1, 1).unwrap();
        assert!(w0.edges().all(|(_, _, w)| w == 2));
        let twice = reinforce_weights(w0, 1, 1).unwrap();
        assert!(twice.edges().all(|(_, _, w)| w == 4));

        let w1 = generate(params(2, 1)).unwrap();
        let old: Vec<_> = w1.edges().filter(|&(u, v, _)| u < 3 && v < 3).collect();
        assert_eq!(old.len(), 3);
        assert!(old.iter().all(|&(_, _, w)| w == 3));
        assert_eq!(w1.edges().filter(|&(_, _, w)| w == 1).count(), 9);
        assert_eq!(w1.total_weight(), 18);
    }

    #[test]
    fn evolve_censuses() {
        let w1 = evolve(&WeightedGraph::seed_triangle(), 1).unwrap();
        let c = census(&w1);
        assert_eq!((c.vertices, c.edges, c.triangles, c.total_weight), (9, 12, 4, 15));
        let w2 = evolve(&w1, 1).unwrap();
        let c = census(&w2);
        assert_eq!((c.vertices, c.edges, c.triangles, c.total_weight), (39, 57, 19, 75));
        let c = census(&evolve(&WeightedGraph::seed_triangle(), 2).unwrap());
        assert_eq!((c.vertices, c.edges, c.triangles, c.total_weight), (9, 12, 4, 18));
    }

    #[test]
    fn generate_examples() {
        assert_eq!(generate(params(1, 0)).unwrap(), WeightedGraph::seed_triangle());
        let w2 = generate(params(1, 2)).unwrap();
        assert_eq!(w2.vertex_count(), 39);
        assert_eq!(w2.edges().map(|e| e.2).max(), Some(4));
        assert_eq!(w2.strengths().iter().max(), Some(&18));
        let w = generate(params(3, 1)).unwrap();
        assert_eq!(w.vertex_count(), 9);
        assert_eq!(w.total_weight(), 21);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(params(2, 3)).unwrap();
        let b = generate(params(2, 3)).unwrap();
        assert_eq!(a, b);
        assert!(a.edges().eq(b.edges()));
    }

    #[test]
    fn every_level_keeps_invariants() {
        for delta in 1..=3 {
            generate_each(params(delta, 4), |g| {
                g.validate().unwrap();
                assert!(g.edges().all(|(u, v, w)| u < v && w >= 1));
            })
            .unwrap();
        }
    }

    #[test]
    fn new_edges_are_one_and_a_half_new_vertices() {
        let mut prev: Option<(usize, usize)> = None;
        generate_each(params(2, 5), |g| {
            if let Some((n, e)) = prev {
                let dv = g.vertex_count() - n;
                let de = g.edge_count() - e;
                assert_eq!(2 * de, 3 * dv);
            }
            prev = Some((g.vertex_count(), g.edge_count()));
        })
        .unwrap();
    }

    #[test]
    fn edges_iterate_in_ascending_order() {
        let g = generate(params(1, 3)).unwrap();
        let list: Vec<_> = g.edges().map(|(u, v, _)| (u, v)).collect();
        assert!(list.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(list.len(), g.edge_count());
    }
}
