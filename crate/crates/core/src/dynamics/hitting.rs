use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::dense::{DenseMatrix, LuFactors};
use crate::error::{CoronaError, Result};
use crate::graph::WeightedGraph;
use crate::params::ModelParams;
use crate::spectra::{Spectrum, SpectrumKind, MERGE_TOLERANCE};
use crate::Rational;

use super::monte_carlo::MonteCarloEstimate;

/// Largest graph handled by the dense absorbing-chain solver.
pub const LINEAR_SOLVE_LIMIT: usize = 500;

/// `pi_i = s_i / sum_j s_j`.
pub fn stationary_distribution(graph: &WeightedGraph) -> Vec<f64> {
    let total = 2.0 * graph.total_weight() as f64;
    graph.strengths().iter().map(|&s| s as f64 / total).collect()
}

/// The stationary distribution as exact fractions.
pub fn stationary_distribution_exact(graph: &WeightedGraph) -> Vec<Rational> {
    let total = 2 * graph.total_weight() as u128;
    graph
        .strengths()
        .iter()
        .map(|&s| Rational::new(s as u128, total))
        .collect()
}

/// Mean hitting time at level `n`, closed form. The `(d+1)^(n+1)/(d+1)^n`
/// ratios are cancelled before evaluating so large `n` cannot overflow.
pub fn hitting_time_closed(delta: u64, n: u32) -> f64 {
    let d = delta as f64;
    let grow = (d + 4.0).powi(n as i32);
    let ratio = ((d + 4.0) / (d + 1.0)).powi(n as i32);
    (4.0 * d * (d + 1.0) + 24.0 * grow * (d + 1.0) - 12.0 * (d + 2.0) * ratio)
        / (3.0 * d * (d + 4.0))
}

/// `H_n = ((d+4)/(d+1)) H_(n-1) + 8 (d+4)^(n-1) - 4/(d+4)`, `H_0 = 4/3`,
/// in exact rational arithmetic.
pub fn hitting_time_recursive_exact(delta: u64, n: u32) -> BigRational {
    let d = BigInt::from(delta);
    let four = BigInt::from(4);
    let ratio = BigRational::new(&d + 4, &d + 1);
    let mut h = BigRational::new(BigInt::from(4), BigInt::from(3));
    let mut power = BigInt::from(1);
    for _ in 0..n {
        h = &ratio * h + BigRational::from_integer(BigInt::from(8) * &power)
            - BigRational::new(four.clone(), &d + 4);
        power *= &d + 4;
    }
    h
}

/// [`hitting_time_recursive_exact`] rounded to `f64`.
pub fn hitting_time_recursive(delta: u64, n: u32) -> f64 {
    hitting_time_recursive_exact(delta, n)
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

/// `H = sum over nonzero Laplacian eigenvalues of m / sigma`.
pub fn hitting_time_spectral(spec: &Spectrum) -> Result<f64> {
    if spec.kind != SpectrumKind::Laplacian {
        return Err(CoronaError::InvalidSpectrum(
            "hitting time needs the Laplacian spectrum".into(),
        ));
    }
    let zeros: u64 = spec
        .entries
        .iter()
        .filter(|e| e.value.abs() <= MERGE_TOLERANCE)
        .map(|e| e.multiplicity)
        .sum();
    if zeros != 1 {
        return Err(CoronaError::InvalidSpectrum(format!(
            "expected exactly one zero eigenvalue, found {zeros}"
        )));
    }
    Ok(spec
        .entries
        .iter()
        .filter(|e| e.value.abs() > MERGE_TOLERANCE)
        .map(|e| e.multiplicity as f64 / e.value)
        .sum())
}

/// Mean hitting time by solving, for every target `j`, the absorbing system
/// `h_i = 1 + sum_k T(i,k) h_k`, `h_j = 0`, with LU and partial pivoting.
///
/// `H = sum_j pi_j h_(i -> j)` is evaluated from three fixed starts (first,
/// middle, last vertex) and must agree across them to relative 1e-6.
pub fn hitting_time_linear_solve(graph: &WeightedGraph) -> Result<f64> {
    let n = graph.vertex_count();
    if n > LINEAR_SOLVE_LIMIT {
        return Err(CoronaError::TooLarge {
            what: "linear-solve vertex count",
            size: n,
            limit: LINEAR_SOLVE_LIMIT,
        });
    }
    if n == 0 || !graph.is_connected() {
        return Err(CoronaError::Precondition("graph must be connected and non-empty".into()));
    }
    let pi = stationary_distribution(graph);
    let mut starts = vec![0, n / 2, n - 1];
    starts.dedup();
    let mut sums = vec![0.0; starts.len()];

    let mut base = DenseMatrix::identity(n);
    for u in graph.vertices() {
        let s = graph.strength(u) as f64;
        for (v, w) in graph.neighbors(u) {
            base[(u as usize, v as usize)] -= w as f64 / s;
        }
    }
    for target in 0..n {
        let mut system = base.clone();
        for k in 0..n {
            system[(target, k)] = 0.0;
        }
        system[(target, target)] = 1.0;
        let mut rhs = vec![1.0; n];
        rhs[target] = 0.0;
        let h = LuFactors::factor(system)?.solve(&rhs);
        for (sum, &start) in sums.iter_mut().zip(&starts) {
            *sum += pi[target] * h[start];
        }
    }
    let reference = sums[0];
    for (&s, &start) in sums.iter().zip(&starts) {
        if (s - reference).abs() > 1e-6 * reference.abs() {
            return Err(CoronaError::Consistency(format!(
                "mean hitting time depends on the start: {s} from vertex {start}, {reference} from vertex 0"
            )));
        }
    }
    Ok(reference)
}

/// Mean hitting time from every route that was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingReport {
    pub params: ModelParams,
    pub closed_form: f64,
    pub recursive: f64,
    pub spectral: f64,
    pub linear_solve: Option<f64>,
    pub monte_carlo: Option<MonteCarloEstimate>,
}

impl HittingReport {
    /// Closed vs spectral and recursive (relative 1e-9), linear solve
    /// (relative 1e-6), Monte Carlo (within 3 standard errors).
    pub fn consistent(&self) -> bool {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        rel(self.spectral, self.closed_form) <= 1e-9
            && rel(self.recursive, self.closed_form) <= 1e-9
            && self
                .linear_solve
                .is_none_or(|x| rel(x, self.closed_form) <= 1e-6)
            && self
                .monte_carlo
                .is_none_or(|mc| mc.within(self.closed_form, 3.0))
    }
}

/// Builds a [`HittingReport`]. The closed, recursive and spectral values are
/// always computed. The linear solve runs when `graph` is given and within
/// [`LINEAR_SOLVE_LIMIT`]; the simulation runs when `monte_carlo` holds
/// `(samples, seed)` and a graph is given, starting from vertex 0.
pub fn hitting_report(
    params: ModelParams,
    graph: Option<&WeightedGraph>,
    monte_carlo: Option<(u64, u64)>,
) -> Result<HittingReport> {
    let (delta, n) = (params.delta(), params.levels());
    let spectral = hitting_time_spectral(&crate::spectra::laplacian_spectrum(delta, n)?)?;
    let linear_solve = match graph {
        Some(g) if g.vertex_count() <= LINEAR_SOLVE_LIMIT => Some(hitting_time_linear_solve(g)?),
        _ => None,
    };
    let monte_carlo = match (graph, monte_carlo) {
        (Some(g), Some((samples, seed))) => {
            Some(super::hitting_time_monte_carlo(g, 0, samples, seed)?)
        }
        _ => None,
    };
    Ok(HittingReport {
        params,
        closed_form: hitting_time_closed(delta, n),
        recursive: hitting_time_recursive(delta, n),
        spectral,
        linear_solve,
        monte_carlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use crate::spectra::laplacian_spectrum;

    fn w(delta: u64, n: u32) -> WeightedGraph {
        generate(ModelParams::new(delta, n).unwrap()).unwrap()
    }

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn stationary_values() {
        let pi = stationary_distribution(&WeightedGraph::seed_triangle());
        assert!(pi.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-16));
        let g = w(1, 1);
        let exact = stationary_distribution_exact(&g);
        assert_eq!(exact[0], Rational::new(1, 5));
        assert_eq!(exact[5], Rational::new(1, 15));
        assert_eq!(exact.iter().copied().sum::<Rational>(), Rational::from_integer(1));
    }

    fn compensated_sum(xs: &[f64]) -> f64 {
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for &x in xs {
            let t = sum + x;
            carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
        }
        sum + carry
    }

    #[test]
    fn stationary_is_a_fixed_point() {
        let g = w(2, 3);
        let pi = stationary_distribution(&g);
        assert!((compensated_sum(&pi) - 1.0).abs() <= 1e-15);
        let mut next = vec![0.0; pi.len()];
        for u in g.vertices() {
            let s = g.strength(u) as f64;
            for (v, wt) in g.neighbors(u) {
                next[v as usize] += pi[u as usize] * wt as f64 / s;
            }
        }
        let residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(residual <= 1e-12);
    }

    #[test]
    fn golden_values() {
        for delta in 1..=4 {
            assert_eq!(hitting_time_recursive_exact(delta, 0), frac(4, 3));
            assert!((hitting_time_closed(delta, 0) - 4.0 / 3.0).abs() < 1e-14);
        }
        assert_eq!(hitting_time_recursive_exact(1, 1), frac(158, 15));
        assert_eq!(hitting_time_recursive_exact(1, 2), frac(983, 15));
        assert!((hitting_time_closed(1, 1) - 158.0 / 15.0).abs() < 1e-12);
        assert!((hitting_time_closed(1, 2) - 983.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn closed_and_recursive_agree() {
        for delta in 1..=6 {
            for n in 0..=20 {
                let (c, r) = (hitting_time_closed(delta, n), hitting_time_recursive(delta, n));
                assert!((c - r).abs() <= 1e-12 * r, "{delta} {n}: {c} {r}");
            }
        }
    }

    #[test]
    fn spectral_sum() {
        let h = hitting_time_spectral(&laplacian_spectrum(1, 0).unwrap()).unwrap();
        assert!((h - 4.0 / 3.0).abs() < 1e-14);
        let h = hitting_time_spectral(&laplacian_spectrum(1, 1).unwrap()).unwrap();
        assert!((h - 158.0 / 15.0).abs() < 1e-12);
        let h = hitting_time_spectral(&laplacian_spectrum(1, 2).unwrap()).unwrap();
        assert!((h - 983.0 / 15.0).abs() <= 1e-9 * h);
    }

    #[test]
    fn spectral_rejects_transition_or_bad_zero() {
        let t = crate::spectra::transition_spectrum(1, 1).unwrap();
        assert!(hitting_time_spectral(&t).is_err());
        let mut l = laplacian_spectrum(1, 1).unwrap();
        l.entries[0].multiplicity = 2;
        assert!(matches!(hitting_time_spectral(&l), Err(CoronaError::InvalidSpectrum(_))));
    }

    #[test]
    fn linear_solve_values() {
        let h = hitting_time_linear_solve(&WeightedGraph::seed_triangle()).unwrap();
        assert!((h - 4.0 / 3.0).abs() < 1e-12);
        let h = hitting_time_linear_solve(&w(1, 1)).unwrap();
        assert!((h - 158.0 / 15.0).abs() <= 1e-6 * h);
        let h = hitting_time_linear_solve(&w(1, 2)).unwrap();
        assert!((h - 983.0 / 15.0).abs() <= 1e-6 * h);
    }

    #[test]
    fn report_is_consistent() {
        let p = ModelParams::new(1, 1).unwrap();
        let g = generate(p).unwrap();
        let r = hitting_report(p, Some(&g), Some((20_000, 3))).unwrap();
        assert!(r.linear_solve.is_some() && r.monte_carlo.is_some());
        assert!(r.consistent(), "{r:?}");
        let r = hitting_report(ModelParams::new(3, 7).unwrap(), None, None).unwrap();
        assert!(r.linear_solve.is_none() && r.consistent());
    }

    #[test]
    fn linear_solve_guard() {
        assert!(matches!(
            hitting_time_linear_solve(&w(1, 4)),
            Err(CoronaError::TooLarge { .. })
        ));
    }
}
