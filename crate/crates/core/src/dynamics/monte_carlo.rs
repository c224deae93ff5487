use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CoronaError, Result};
use crate::graph::{VertexId, WeightedGraph};

/// Samples drawn from each RNG stream. Stream `k` of a run seeded with `s`
/// is `ChaCha8Rng::seed_from_u64(s)` with `set_stream(k)` and produces
/// samples `k * SAMPLES_PER_STREAM ..`; the allocation never depends on the
/// number of worker threads.
pub const SAMPLES_PER_STREAM: u64 = 4096;

/// Sample mean of the walk length with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Prefix sums of strengths and of each vertex's neighbor weights, for
/// sampling with exact integer thresholds.
struct Sampler<'a> {
    graph: &'a WeightedGraph,
    strength_prefix: Vec<u64>,
    weight_offsets: Vec<usize>,
    weight_prefix: Vec<u64>,
}

impl<'a> Sampler<'a> {
    fn new(graph: &'a WeightedGraph) -> Self {
        let mut strength_prefix = Vec::with_capacity(graph.vertex_count());
        let mut acc = 0u64;
        for &s in graph.strengths() {
            acc += s;
            strength_prefix.push(acc);
        }
        let mut weight_offsets = Vec::with_capacity(graph.vertex_count() + 1);
        let mut weight_prefix = Vec::with_capacity(2 * graph.edge_count());
        weight_offsets.push(0);
        for u in graph.vertices() {
            let mut acc = 0u64;
            for &w in graph.neighbor_weights(u) {
                acc += w;
                weight_prefix.push(acc);
            }
            weight_offsets.push(weight_prefix.len());
        }
        Sampler {
            graph,
            strength_prefix,
            weight_offsets,
            weight_prefix,
        }
    }

    fn stationary_vertex(&self, rng: &mut ChaCha8Rng) -> VertexId {
        let total = *self.strength_prefix.last().expect("non-empty graph");
        let r = rng.gen_range(0..total);
        self.strength_prefix.partition_point(|&c| c <= r) as VertexId
    }

    fn step(&self, u: VertexId, rng: &mut ChaCha8Rng) -> VertexId {
        let u = u as usize;
        let prefix = &self.weight_prefix[self.weight_offsets[u]..self.weight_offsets[u + 1]];
        let r = rng.gen_range(0..self.graph.strength(u as VertexId));
        self.graph.neighbor_ids(u as VertexId)[prefix.partition_point(|&c| c <= r)]
    }

    fn walk_length(&self, start: VertexId, rng: &mut ChaCha8Rng) -> u64 {
        let target = self.stationary_vertex(rng);
        let mut at = start;
        let mut steps = 0u64;
        while at != target {
            at = self.step(at, rng);
            steps += 1;
        }
        steps
    }
}

/// Estimates the mean hitting time from `start` by simulation: each sample
/// draws a target from the stationary distribution (a target equal to
/// `start` counts zero steps) and walks with probabilities `w/s` until the
/// target is reached.
///
/// Step counts are accumulated exactly as integers per stream, so the result
/// is bit-identical for a given seed regardless of thread count.
pub fn hitting_time_monte_carlo(
    graph: &WeightedGraph,
    start: VertexId,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(CoronaError::InvalidParams("samples must be at least 1".into()));
    }
    if start as usize >= graph.vertex_count() {
        return Err(CoronaError::Precondition(format!(
            "start vertex {start} is not in the graph"
        )));
    }
    if !graph.is_connected() {
        return Err(CoronaError::Precondition("graph must be connected".into()));
    }
    let sampler = Sampler::new(graph);
    let streams = samples.div_ceil(SAMPLES_PER_STREAM);
    let (sum, sum_sq) = (0..streams)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let count = SAMPLES_PER_STREAM.min(samples - k * SAMPLES_PER_STREAM);
            let mut sum = 0u128;
            let mut sum_sq = 0u128;
            for _ in 0..count {
                let steps = sampler.walk_length(start, &mut rng) as u128;
                sum += steps;
                sum_sq += steps * steps;
            }
            (sum, sum_sq)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = samples as f64;
    let mean = sum as f64 / n;
    let std_error = if samples > 1 {
        let centered = sum_sq as f64 - (sum as f64) * mean;
        (centered.max(0.0) / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_triangle_estimate() {
        let g = WeightedGraph::seed_triangle();
        let mc = hitting_time_monte_carlo(&g, 1, 20_000, 7).unwrap();
        assert!(mc.within(4.0 / 3.0, 3.0), "{mc:?}");
        assert_eq!(mc.samples, 20_000);
    }

    #[test]
    fn same_seed_same_bits() {
        let g = WeightedGraph::seed_triangle();
        let a = hitting_time_monte_carlo(&g, 0, 9_000, 42).unwrap();
        let b = hitting_time_monte_carlo(&g, 0, 9_000, 42).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = hitting_time_monte_carlo(&g, 0, 9_000, 43).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let g = WeightedGraph::seed_triangle();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| hitting_time_monte_carlo(&g, 2, 10_000, 5).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn single_sample_has_zero_error() {
        let g = WeightedGraph::seed_triangle();
        let mc = hitting_time_monte_carlo(&g, 0, 1, 1).unwrap();
        assert_eq!(mc.std_error, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = WeightedGraph::seed_triangle();
        assert!(hitting_time_monte_carlo(&g, 0, 0, 1).is_err());
        assert!(hitting_time_monte_carlo(&g, 3, 10, 1).is_err());
    }
}
