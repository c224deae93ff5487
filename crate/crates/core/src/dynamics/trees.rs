use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use crate::census::expected_census;
use crate::error::{CoronaError, Result};
use crate::graph::WeightedGraph;
use crate::params::{checked_pow, exact_div, to_u64, ModelParams};
use crate::spectra::{Spectrum, SpectrumKind, MERGE_TOLERANCE};

/// Exponents above this are kept in log form only.
pub const EXACT_EXPONENT_LIMIT: u64 = 10_000;
/// Largest graph accepted by the exact cofactor oracle.
pub const KIRCHHOFF_LIMIT: usize = 64;

/// Weighted spanning-tree count `3^a (d+1)^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCount {
    pub delta: u64,
    pub exact: Option<BigUint>,
    pub log_value: f64,
    pub exponents: (u64, u64),
}

impl TreeCount {
    fn from_exponents(delta: u64, a: u64, b: u64) -> Self {
        let log_value = a as f64 * 3f64.ln() + b as f64 * ((delta + 1) as f64).ln();
        let exact = (a <= EXACT_EXPONENT_LIMIT && b <= EXACT_EXPONENT_LIMIT).then(|| {
            Pow::pow(BigUint::from(3u8), a) * Pow::pow(BigUint::from(delta + 1), b)
        });
        TreeCount {
            delta,
            exact,
            log_value,
            exponents: (a, b),
        }
    }
}

fn mul(a: u128, b: u128, what: &'static str) -> Result<u128> {
    a.checked_mul(b).ok_or(CoronaError::Overflow(what))
}

fn add(a: u128, b: u128, what: &'static str) -> Result<u128> {
    a.checked_add(b).ok_or(CoronaError::Overflow(what))
}

/// Closed form: `a = (3 (d+4)^n + d)/(d+3)`,
/// `b = 2 (3 ((d+4)^n - 1) + d (d+3) n)/(d+3)^2`.
pub fn tree_count_closed(params: ModelParams) -> Result<TreeCount> {
    let d = params.delta() as u128;
    let n = params.levels() as u128;
    let p = checked_pow(params.delta() + 4, params.levels(), "(delta+4)^n")? as u128;
    let a = exact_div(3 * p + d, d + 3, "tree exponent a")?;
    let linear = mul(mul(d, d + 3, "tree exponent b")?, n, "tree exponent b")?;
    let b_num = mul(2, add(3 * (p - 1), linear, "tree exponent b")?, "tree exponent b")?;
    let b = exact_div(b_num, mul(d + 3, d + 3, "tree exponent b")?, "tree exponent b")?;
    Ok(TreeCount::from_exponents(
        params.delta(),
        to_u64(a, "tree exponent a")?,
        to_u64(b, "tree exponent b")?,
    ))
}

/// Product over triangles: every triangle contributes a factor 3 and its
/// edge weights contribute powers of `d+1`; `a` is the triangle count and
/// `b = 2n + sum_(i=1..n) 2 (n-i) 3 (d+4)^(i-1)`.
pub fn tree_count_triangles(params: ModelParams) -> Result<TreeCount> {
    let n = params.levels() as u128;
    let a = expected_census(params)?.triangles;
    let mut b = 2 * n;
    let mut born = 3u128;
    for i in 1..=n {
        b = add(b, mul(2 * (n - i), born, "tree exponent b")?, "tree exponent b")?;
        born = mul(born, params.delta() as u128 + 4, "tree exponent b")?;
    }
    Ok(TreeCount::from_exponents(params.delta(), a, to_u64(b, "tree exponent b")?))
}

/// `ln tau = sum ln s_i + sum over nonzero sigma of m ln sigma - ln (sum s_i)`.
pub fn tree_count_spectral(graph: &WeightedGraph, spec: &Spectrum) -> Result<f64> {
    if spec.kind != SpectrumKind::Laplacian {
        return Err(CoronaError::InvalidSpectrum(
            "tree count needs the Laplacian spectrum".into(),
        ));
    }
    if spec.total_multiplicity() != graph.vertex_count() as u64 {
        return Err(CoronaError::InvalidSpectrum(format!(
            "spectrum has {} eigenvalues but the graph has {} vertices",
            spec.total_multiplicity(),
            graph.vertex_count()
        )));
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
    let strengths: f64 = graph.strengths().iter().map(|&s| (s as f64).ln()).sum();
    let sigmas: f64 = spec
        .entries
        .iter()
        .filter(|e| e.value.abs() > MERGE_TOLERANCE)
        .map(|e| e.multiplicity as f64 * e.value.ln())
        .sum();
    Ok(strengths + sigmas - (2.0 * graph.total_weight() as f64).ln())
}

/// Exact weighted spanning-tree count as the determinant of the weighted
/// Laplacian with the first row and column removed.
pub fn tree_count_kirchhoff(graph: &WeightedGraph) -> Result<BigUint> {
    let n = graph.vertex_count();
    if n > KIRCHHOFF_LIMIT {
        return Err(CoronaError::TooLarge {
            what: "Kirchhoff vertex count",
            size: n,
            limit: KIRCHHOFF_LIMIT,
        });
    }
    if n == 0 {
        return Err(CoronaError::Precondition("graph is empty".into()));
    }
    let mut minor = vec![vec![BigInt::zero(); n - 1]; n - 1];
    for u in 1..n {
        minor[u - 1][u - 1] = BigInt::from(graph.strength(u as u32));
        for (v, w) in graph.neighbors(u as u32) {
            if v != 0 {
                minor[u - 1][v as usize - 1] = -BigInt::from(w);
            }
        }
    }
    let det = bareiss_determinant(minor);
    det.to_biguint().ok_or_else(|| {
        CoronaError::Consistency(format!("Laplacian cofactor is negative: {det}"))
    })
}

/// Determinant of a square integer matrix by fraction-free elimination.
/// Every intermediate division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { BigInt::one() } else { prev };
    if sign < 0 {
        -det
    } else {
        det
    }
}
