use std::collections::BTreeMap;

use num_rational::Ratio;

use super::classes::degree_classes;
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::params::ModelParams;

/// One distinct value with its multiplicity and the fraction of elements
/// whose value is at least this one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributionRow {
    pub value: u64,
    pub count: u64,
    pub p_cum: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distributions {
    pub strength: Vec<DistributionRow>,
    pub degree: Vec<DistributionRow>,
    pub weight: Vec<DistributionRow>,
}

fn cumulate(counts: BTreeMap<u64, u64>) -> Vec<DistributionRow> {
    let total: u64 = counts.values().sum();
    let mut above = total;
    counts
        .into_iter()
        .map(|(value, count)| {
            let row = DistributionRow {
                value,
                count,
                p_cum: Ratio::new(above, total),
            };
            above -= count;
            row
        })
        .collect()
}

/// Cumulative strength, degree and edge-weight distributions from the
/// birth-class closed forms. Vertex tables are normalized by `N`, the
/// weight table by `E`.
pub fn cumulative_distributions(params: ModelParams) -> Result<Distributions> {
    let table = degree_classes(params)?;
    let mut strength = BTreeMap::new();
    let mut degree = BTreeMap::new();
    let mut weight = BTreeMap::new();
    for row in &table.rows {
        *strength.entry(row.strength).or_insert(0) += row.size;
        *degree.entry(row.degree).or_insert(0) += row.size;
        *weight.entry(row.edge_weight).or_insert(0) += row.edges_born;
    }
    Ok(Distributions {
        strength: cumulate(strength),
        degree: cumulate(degree),
        weight: cumulate(weight),
    })
}

/// The same three tables measured directly on a graph.
pub fn empirical_distributions(graph: &WeightedGraph) -> Distributions {
    let mut strength = BTreeMap::new();
    let mut degree = BTreeMap::new();
    let mut weight = BTreeMap::new();
    for v in graph.vertices() {
        *strength.entry(graph.strength(v)).or_insert(0) += 1;
        *degree.entry(graph.degree(v) as u64).or_insert(0) += 1;
    }
    for (_, _, w) in graph.edges() {
        *weight.entry(w).or_insert(0) += 1;
    }
    Distributions {
        strength: cumulate(strength),
        degree: cumulate(degree),
        weight: cumulate(weight),
    }
}

/// Power-law exponents of the strength, degree and weight distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub strength: f64,
    pub degree: f64,
    pub weight: f64,
}

pub fn distribution_exponents(delta: u64) -> Exponents {
    let d = delta as f64;
    let vertex = 1.0 + (d + 4.0).ln() / (d + 2.0).ln();
    Exponents {
        strength: vertex,
        degree: vertex,
        weight: 1.0 + (d + 4.0).ln() / (d + 1.0).ln(),
    }
}

/// Least-squares slope of `ln p_cum` against `ln value`. Diagnostic only:
/// finite tables carry an additive offset the exact exponents ignore.
pub fn log_log_slope(rows: &[DistributionRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let p = *r.p_cum.numer() as f64 / *r.p_cum.denom() as f64;
            ((r.value as f64).ln(), p.ln())
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
