//! Stable text renderings of graphs and results. Every renderer is a pure
//! function of its input, so equal inputs always give equal bytes.

use std::fmt::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::analytics::{CorrelationReport, DegreeClassTable, DistributionRow};
use crate::census::Census;
use crate::dynamics::{HittingReport, TreeCount};
use crate::graph::WeightedGraph;
use crate::spectra::Spectrum;

/// Significant digits for eigenvalues and JSON reals.
pub const REAL_DIGITS: usize = 15;
/// Significant digits for cumulative probabilities.
pub const PROBABILITY_DIGITS: usize = 12;

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// removed. Plain notation is used for decimal exponents in `[-6, digits)`,
/// scientific otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if mantissa.starts_with('-') { "-" } else { "" };
    let all: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits_str = all.trim_end_matches('0');
    let digits_str = if digits_str.is_empty() { "0" } else { digits_str };

    if exp < -6 || exp >= digits as i32 {
        let (head, tail) = digits_str.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits_str.len() <= int_len {
            format!("{sign}{digits_str:0<int_len$}")
        } else {
            let (int_part, frac) = digits_str.split_at(int_len);
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits_str}")
    }
}

fn json_real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_sig(x, REAL_DIGITS)).expect("valid JSON number"))
}

fn json_opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json_real)
}

fn to_json_text(map: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
    s.push('\n');
    s
}

/// Edge list: a header line, then `u<TAB>v<TAB>w` with `u < v`, ascending.
pub fn render_edge_list(graph: &WeightedGraph, delta: u64) -> String {
    let mut out = format!("# corona-net v1 delta={delta} n={}\n", graph.level());
    for (u, v, w) in graph.edges() {
        writeln!(out, "{u}\t{v}\t{w}").unwrap();
    }
    out
}

pub fn render_vertices(graph: &WeightedGraph) -> String {
    let mut out = String::from("vertex,birth,degree,strength\n");
    for v in graph.vertices() {
        writeln!(
            out,
            "{v},{},{},{}",
            graph.birth(v),
            graph.degree(v),
            graph.strength(v)
        )
        .unwrap();
    }
    out
}

pub fn render_distribution(rows: &[DistributionRow]) -> String {
    let mut out = String::from("value,count,p_cum\n");
    for r in rows {
        let p = *r.p_cum.numer() as f64 / *r.p_cum.denom() as f64;
        writeln!(out, "{},{},{}", r.value, r.count, fmt_sig(p, PROBABILITY_DIGITS)).unwrap();
    }
    out
}

pub fn render_classes(table: &DegreeClassTable) -> String {
    let mut out = String::from("birth,size,strength,degree,edge_weight\n");
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.birth, r.size, r.strength, r.degree, r.edge_weight
        )
        .unwrap();
    }
    out
}

/// Missing closed values are left empty.
pub fn render_correlations(report: &CorrelationReport) -> String {
    let opt = |x: Option<f64>| x.map_or(String::new(), |x| fmt_sig(x, REAL_DIGITS));
    let mut out = String::from("degree,knn_closed,knn_emp,knnw_closed,knnw_emp,flag\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.degree,
            opt(r.knn_closed),
            fmt_sig(r.knn_empirical, REAL_DIGITS),
            opt(r.knnw_closed),
            fmt_sig(r.knnw_empirical, REAL_DIGITS),
            r.flag.as_str()
        )
        .unwrap();
    }
    out
}

pub fn render_spectrum(spec: &Spectrum) -> String {
    let mut out = String::from("value,multiplicity\n");
    for e in &spec.entries {
        writeln!(out, "{},{}", fmt_sig(e.value, REAL_DIGITS), e.multiplicity).unwrap();
    }
    out
}

pub fn render_hitting_json(delta: u64, report: &HittingReport, seed: u64) -> String {
    let mut map = Map::new();
    map.insert("delta".into(), delta.into());
    map.insert("n".into(), report.params.levels().into());
    map.insert("closed".into(), json_real(report.closed_form));
    map.insert("spectral".into(), json_real(report.spectral));
    map.insert("linear_solve".into(), json_opt(report.linear_solve));
    let mc = report.monte_carlo;
    map.insert("mc_mean".into(), json_opt(mc.map(|m| m.mean)));
    map.insert("mc_stderr".into(), json_opt(mc.map(|m| m.std_error)));
    map.insert(
        "mc_samples".into(),
        mc.map_or(Value::Null, |m| m.samples.into()),
    );
    map.insert("seed".into(), seed.into());
    to_json_text(map)
}

pub fn render_trees_json(n: u32, trees: &TreeCount) -> String {
    let mut map = Map::new();
    map.insert("delta".into(), trees.delta.into());
    map.insert("n".into(), n.into());
    map.insert("a".into(), trees.exponents.0.into());
    map.insert("b".into(), trees.exponents.1.into());
    map.insert("log_tau".into(), json_real(trees.log_value));
    map.insert(
        "exact_tau".into(),
        trees
            .exact
            .as_ref()
            .map_or(Value::Null, |t| Value::String(t.to_string())),
    );
    to_json_text(map)
}

/// Headline numbers written next to the analytics tables.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub delta: u64,
    pub n: u32,
    pub census: Census,
    pub gamma_strength: f64,
    pub gamma_degree: f64,
    pub gamma_weight: f64,
    pub clustering_closed: f64,
    pub clustering_empirical: f64,
    pub diameter: Option<u32>,
    pub diameter_closed: u32,
}

pub fn render_summary_json(s: &StatsSummary) -> String {
    let mut map = Map::new();
    map.insert("delta".into(), s.delta.into());
    map.insert("n".into(), s.n.into());
    map.insert("vertices".into(), s.census.vertices.into());
    map.insert("edges".into(), s.census.edges.into());
    map.insert("triangles".into(), s.census.triangles.into());
    map.insert("total_weight".into(), s.census.total_weight.into());
    map.insert("gamma_s".into(), json_real(s.gamma_strength));
    map.insert("gamma_k".into(), json_real(s.gamma_degree));
    map.insert("gamma_w".into(), json_real(s.gamma_weight));
    map.insert("clustering_closed".into(), json_real(s.clustering_closed));
    map.insert("clustering_emp".into(), json_real(s.clustering_empirical));
    map.insert(
        "diameter".into(),
        s.diameter.map_or(Value::Null, |d| d.into()),
    );
    map.insert("diameter_closed".into(), s.diameter_closed.into());
    to_json_text(map)
}
