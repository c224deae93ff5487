//! Eigenvalues of the normalized adjacency (transition) matrix and the
//! normalized Laplacian, built level by level with exact multiplicities,
//! plus the dense matrices used to check them.

use crate::census::expected_census;
use crate::dense::{symmetric_eigenvalues, DenseMatrix};
use crate::error::{CoronaError, Result};
use crate::graph::WeightedGraph;
use crate::params::{checked_pow, exact_div, to_u64, ModelParams};

/// Values closer than this are the same eigenvalue.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Largest graph turned into a dense matrix.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Transition,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: u64,
}

/// Eigenvalue multiset at one level, ascending by value.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub level: u32,
    pub kind: SpectrumKind,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Multiplicity of the entry within [`MERGE_TOLERANCE`] of `value`.
    pub fn multiplicity_of(&self, value: f64) -> u64 {
        self.entries
            .iter()
            .find(|e| (e.value - value).abs() <= MERGE_TOLERANCE)
            .map_or(0, |e| e.multiplicity)
    }

    /// Every eigenvalue repeated by its multiplicity, ascending.
    pub fn expand(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity as usize))
            .collect()
    }

    /// `sum m * value^power`.
    pub fn moment(&self, power: i32) -> f64 {
        self.entries
            .iter()
            .map(|e| e.multiplicity as f64 * e.value.powi(power))
            .sum()
    }

    fn from_unsorted(level: u32, kind: SpectrumKind, mut entries: Vec<SpectrumEntry>) -> Result<Self> {
        entries.retain(|e| e.multiplicity > 0);
        entries.sort_by(|a, b| a.value.total_cmp(&b.value));
        if let Some(pair) = entries
            .windows(2)
            .find(|p| p[1].value - p[0].value <= MERGE_TOLERANCE)
        {
            return Err(CoronaError::Consistency(format!(
                "eigenvalues {} and {} from different parents collide at level {level}",
                pair[0].value, pair[1].value
            )));
        }
        Ok(Spectrum {
            level,
            kind,
            entries,
        })
    }
}

/// The two eigenvalues at the next level generated by `parent`: roots of
/// `2(d+2) x^2 - [(d+2) + 2(d+1) p] x + [(d+1) p - 1] = 0`, ascending.
pub fn child_eigenvalues(parent: f64, delta: u64) -> Result<(f64, f64)> {
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&parent) {
        return Err(CoronaError::OutOfDomain(format!(
            "parent eigenvalue {parent} outside [-1, 1]"
        )));
    }
    let d = delta as f64;
    let a = 2.0 * (d + 2.0);
    let b = -((d + 2.0) + 2.0 * (d + 1.0) * parent);
    let c = (d + 1.0) * parent - 1.0;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(CoronaError::Numeric(format!(
            "negative discriminant {disc} for parent {parent}"
        )));
    }
    // larger-magnitude root first, the other from the product of roots
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    Ok(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Inverse of the child map: `f(x) = (d+2) x/(d+1) - 1/((d+1)(2x-1))`.
pub fn parent_of(child: f64, delta: u64) -> f64 {
    let d = delta as f64;
    (d + 2.0) * child / (d + 1.0) - 1.0 / ((d + 1.0) * (2.0 * child - 1.0))
}

/// Multiplicity of eigenvalue `+1/2` at level `n >= 1`:
/// `3(d+1)((d+4)^(n-1) - 1)/(d+3)`.
pub fn mult_plus_half(delta: u64, n: u32) -> Result<u64> {
    if n == 0 {
        return Err(CoronaError::OutOfDomain(
            "the +1/2 multiplicity is defined for n >= 1".into(),
        ));
    }
    let p = checked_pow(delta + 4, n - 1, "(delta+4)^(n-1)")? as u128;
    let d = delta as u128;
    to_u64(exact_div(3 * (d + 1) * (p - 1), d + 3, "m(+1/2)")?, "m(+1/2)")
}

/// Multiplicity of eigenvalue `-1/2` at level `n`: the solution
/// `(3(d+4)^n + 2d + 3)/(d+3)` of `m_n = m_(n-1) + n_v(n)/2`, `m_0 = 2`.
pub fn mult_minus_half(delta: u64, n: u32) -> Result<u64> {
    let p = checked_pow(delta + 4, n, "(delta+4)^n")? as u128;
    let d = delta as u128;
    to_u64(exact_div(3 * p + 2 * d + 3, d + 3, "m(-1/2)")?, "m(-1/2)")
}

/// The `-1/2` multiplicity as originally stated, with exponent `n+1`.
/// It overshoots the vertex count and is kept only for the report.
pub fn mult_minus_half_printed(delta: u64, n: u32) -> Result<u64> {
    let p = checked_pow(delta + 4, n + 1, "(delta+4)^(n+1)")? as u128;
    let d = delta as u128;
    to_u64(exact_div(3 * p + 2 * d + 3, d + 3, "printed m(-1/2)")?, "printed m(-1/2)")
}

/// The `(-1/2, +1/2)` multiplicity pair as assigned in the original
/// statement of the level recursion, for `n >= 1`. Report-only.
pub fn theorem_multiplicities_printed(delta: u64, n: u32) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(CoronaError::OutOfDomain("n must be >= 1".into()));
    }
    let p = checked_pow(delta + 4, n - 1, "(delta+4)^(n-1)")? as u128;
    let d = delta as u128;
    let minus = exact_div(3 * (d + 1) * (p - 1), d + 3, "printed pair")?;
    let plus = exact_div(3 * (d + 1) * (p + 1), d + 3, "printed pair")?;
    Ok((to_u64(minus, "printed pair")?, to_u64(plus, "printed pair")?))
}

fn is_fixed_minus_half(value: f64) -> bool {
    (value + 0.5).abs() <= MERGE_TOLERANCE
}

/// One level of the transition-spectrum recursion.
///
/// Each parent other than `-1/2` yields both children with its
/// multiplicity. The `-1/2` parent yields only its non-fixed child
/// `(d+3)/(2(d+2))`. Then `+1/2` and `-1/2` are added with their closed
/// multiplicities and the total is checked against the vertex count.
pub fn advance_spectrum(spec: &Spectrum, delta: u64) -> Result<Spectrum> {
    if spec.kind != SpectrumKind::Transition {
        return Err(CoronaError::InvalidSpectrum(
            "recursion runs on the transition spectrum".into(),
        ));
    }
    let level = spec.level + 1;
    let d = delta as f64;
    let mut entries = Vec::with_capacity(2 * spec.entries.len() + 2);
    for e in &spec.entries {
        if is_fixed_minus_half(e.value) {
            entries.push(SpectrumEntry {
                value: (d + 3.0) / (2.0 * (d + 2.0)),
                multiplicity: e.multiplicity,
            });
            continue;
        }
        let (lo, hi) = child_eigenvalues(e.value, delta)?;
        for child in [lo, hi] {
            if (child - 0.5).abs() <= MERGE_TOLERANCE {
                return Err(CoronaError::Consistency(format!(
                    "parent {} produced the excluded child 1/2",
                    e.value
                )));
            }
            entries.push(SpectrumEntry {
                value: child,
                multiplicity: e.multiplicity,
            });
        }
    }
    entries.push(SpectrumEntry {
        value: 0.5,
        multiplicity: mult_plus_half(delta, level)?,
    });
    entries.push(SpectrumEntry {
        value: -0.5,
        multiplicity: mult_minus_half(delta, level)?,
    });
    let next = Spectrum::from_unsorted(level, SpectrumKind::Transition, entries)?;
    let expected = expected_census(ModelParams::new(delta, level)?)?.vertices;
    if next.total_multiplicity() != expected {
        return Err(CoronaError::Consistency(format!(
            "level {level}: multiplicities sum to {} but the graph has {expected} vertices",
            next.total_multiplicity()
        )));
    }
    Ok(next)
}

/// The seed spectrum `{-1/2, -1/2, 1}`.
pub fn seed_spectrum() -> Spectrum {
    Spectrum {
        level: 0,
        kind: SpectrumKind::Transition,
        entries: vec![
            SpectrumEntry {
                value: -0.5,
                multiplicity: 2,
            },
            SpectrumEntry {
                value: 1.0,
                multiplicity: 1,
            },
        ],
    }
}

/// Transition spectrum at `n` by repeated [`advance_spectrum`].
pub fn transition_spectrum(delta: u64, n: u32) -> Result<Spectrum> {
    ModelParams::new(delta, n)?;
    (0..n).try_fold(seed_spectrum(), |spec, _| advance_spectrum(&spec, delta))
}

/// Normalized-Laplacian spectrum at `n`: `sigma = 1 - lambda` on the
/// transition spectrum.
///
/// Along the way, every parent/children triple is checked against the
/// Laplacian-side root relations `g1 + g2 = ((2d+2) s + d + 4)/(2(d+2))`
/// and `g1 g2 = (d+1) s/(2(d+2))` to 1e-9.
pub fn laplacian_spectrum(delta: u64, n: u32) -> Result<Spectrum> {
    ModelParams::new(delta, n)?;
    let d = delta as f64;
    let mut spec = seed_spectrum();
    for _ in 0..n {
        for e in &spec.entries {
            let (lo, hi) = child_eigenvalues(e.value, delta)?;
            let parent = 1.0 - e.value;
            let (g1, g2) = (1.0 - hi, 1.0 - lo);
            let sum = ((2.0 * d + 2.0) * parent + d + 4.0) / (2.0 * (d + 2.0));
            let product = (d + 1.0) * parent / (2.0 * (d + 2.0));
            if (g1 + g2 - sum).abs() > 1e-9 || (g1 * g2 - product).abs() > 1e-9 {
                return Err(CoronaError::Consistency(format!(
                    "Laplacian children of {parent} violate the root relations"
                )));
            }
        }
        spec = advance_spectrum(&spec, delta)?;
    }
    to_laplacian(&spec)
}

/// `sigma = 1 - lambda` entrywise.
pub fn to_laplacian(spec: &Spectrum) -> Result<Spectrum> {
    if spec.kind != SpectrumKind::Transition {
        return Err(CoronaError::InvalidSpectrum("expected a transition spectrum".into()));
    }
    let entries = spec
        .entries
        .iter()
        .rev()
        .map(|e| SpectrumEntry {
            value: 1.0 - e.value,
            multiplicity: e.multiplicity,
        })
        .collect();
    Ok(Spectrum {
        level: spec.level,
        kind: SpectrumKind::Laplacian,
        entries,
    })
}

fn dense_guard(graph: &WeightedGraph) -> Result<()> {
    if graph.vertex_count() > DENSE_LIMIT {
        return Err(CoronaError::TooLarge {
            what: "dense matrix order",
            size: graph.vertex_count(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// `P(i, j) = w_ij / sqrt(s_i s_j)`.
pub fn normalized_adjacency(graph: &WeightedGraph) -> Result<DenseMatrix> {
    dense_guard(graph)?;
    let mut m = DenseMatrix::zeros(graph.vertex_count());
    for (u, v, w) in graph.edges() {
        let x = w as f64 / ((graph.strength(u) as f64) * (graph.strength(v) as f64)).sqrt();
        m[(u as usize, v as usize)] = x;
        m[(v as usize, u as usize)] = x;
    }
    Ok(m)
}

/// `I - P`.
pub fn normalized_laplacian(graph: &WeightedGraph) -> Result<DenseMatrix> {
    let p = normalized_adjacency(graph)?;
    let n = p.size();
    let mut l = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] -= p[(i, j)];
        }
    }
    Ok(l)
}

/// Dense eigenvalues, ascending (cyclic Jacobi).
pub fn dense_eigenvalues(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(matrix)
}

/// Groups sorted dense eigenvalues into a spectrum. Neighbors closer than
/// `tolerance` fold into one entry.
pub fn group_eigenvalues(level: u32, kind: SpectrumKind, values: &[f64], tolerance: f64) -> Spectrum {
    let mut entries: Vec<(f64, u64, f64)> = Vec::new();
    for &v in values {
        match entries.last_mut() {
            Some(last) if (v - last.2).abs() <= tolerance => {
                last.0 += v;
                last.1 += 1;
                last.2 = v;
            }
            _ => entries.push((v, 1, v)),
        }
    }
    Spectrum {
        level,
        kind,
        entries: entries
            .into_iter()
            .map(|(sum, m, _)| SpectrumEntry {
                value: sum / m as f64,
                multiplicity: m,
            })
            .collect(),
    }
}

/// Largest |recursive - dense| after expanding multiplicities.
pub fn max_deviation(recursive: &Spectrum, dense: &[f64]) -> Result<f64> {
    let expanded = recursive.expand();
    if expanded.len() != dense.len() {
        return Err(CoronaError::InvalidSpectrum(format!(
            "recursive spectrum has {} values, dense has {}",
            expanded.len(),
            dense.len()
        )));
    }
    Ok(expanded
        .iter()
        .zip(dense)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `trace(P^2) = sum over edges of 2 w^2 / (s_u s_v)`.
pub fn trace_of_square(graph: &WeightedGraph) -> f64 {
    graph
        .edges()
        .map(|(u, v, w)| {
            let w = w as f64;
            2.0 * w * w / (graph.strength(u) as f64 * graph.strength(v) as f64)
        })
        .sum()
}

/// Outcome of one spectrum check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheckReport {
    pub checks: Vec<Check>,
}

impl SpectrumCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Turns the report into an error listing the failed checks.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        Err(CoronaError::InvalidSpectrum(failed.join("; ")))
    }
}

/// Trace identities of a transition spectrum:
/// (a) multiplicities sum to `N`; (b) `sum m lambda = 0` within `1e-9 N`;
/// (c) `sum m lambda^2 = trace(P^2)` to relative 1e-9, when a graph is
/// given; (d) every `|lambda| <= 1`.
pub fn spectrum_checks(
    spec: &Spectrum,
    delta: u64,
    graph: Option<&WeightedGraph>,
) -> Result<SpectrumCheckReport> {
    if spec.kind != SpectrumKind::Transition {
        return Err(CoronaError::InvalidSpectrum(
            "trace checks apply to the transition spectrum".into(),
        ));
    }
    let vertices = expected_census(ModelParams::new(delta, spec.level)?)?.vertices;
    let total = spec.total_multiplicity();
    let mut checks = vec![Check::new(
        "multiplicity sum",
        total == vertices,
        format!("{total} vs N = {vertices}"),
    )];
    let first = spec.moment(1);
    checks.push(Check::new(
        "zero trace",
        first.abs() <= 1e-9 * vertices as f64,
        format!("sum m*lambda = {first:e}"),
    ));
    if let Some(g) = graph {
        let spectral = spec.moment(2);
        let direct = trace_of_square(g);
        let rel = (spectral - direct).abs() / direct.abs().max(1.0);
        checks.push(Check::new(
            "trace of P^2",
            rel <= 1e-9,
            format!("spectral {spectral} vs edge sum {direct} (rel {rel:e})"),
        ));
    }
    let worst = spec.entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    checks.push(Check::new(
        "bounded by 1",
        worst <= 1.0 + 1e-12,
        format!("max |lambda| = {worst}"),
    ));
    Ok(SpectrumCheckReport { checks })
}
