//! The full invariant suite for one parameter point, and its Markdown
//! report. Expensive oracles are skipped above fixed size limits and the
//! skip is recorded.

use std::fmt::Write;

use crate::analytics::{
    closed_degree, closed_edge_weight, closed_strength, clustering_all,
    correlation_report, cumulative_distributions, degree_classes, diameter, diameter_closed,
    empirical_distributions, global_clustering_closed, global_clustering_empirical,
    global_clustering_printed, knn_printed_degree_form, knnw_printed_degree_form,
    CorrelationFlag,
};
use crate::census::{census, expected_census, vertex_triangles};
use crate::dynamics::{
    hitting_report, tree_count_closed, tree_count_kirchhoff, tree_count_spectral,
    tree_count_triangles, KIRCHHOFF_LIMIT, LINEAR_SOLVE_LIMIT,
};
use crate::error::Result;
use crate::graph::{generate_each, WeightedGraph};
use crate::output::fmt_sig;
use crate::params::ModelParams;
use crate::spectra::{
    dense_eigenvalues, laplacian_spectrum, max_deviation, mult_minus_half,
    mult_minus_half_printed, mult_plus_half, normalized_adjacency, spectrum_checks,
    theorem_multiplicities_printed, transition_spectrum, SpectrumKind,
};
use crate::Rational;

/// Largest graph for the dense eigenvalue comparison.
pub const DENSE_ORACLE_LIMIT: usize = 400;
/// Largest graph for all-sources breadth-first search.
pub const DIAMETER_LIMIT: usize = 50_000;
/// Highest level at which the random-walk simulation runs.
pub const MONTE_CARLO_MAX_LEVEL: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub params: ModelParams,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCheck {
    pub section: &'static str,
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

/// A reference formula that was not adopted, with the values that show why.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaNote {
    pub title: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub options: VerifyOptions,
    pub checks: Vec<VerifyCheck>,
    pub notes: Vec<FormulaNote>,
}

impl VerificationReport {
    /// True when no check failed. Skipped checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCheck> {
        self.checks.iter().filter(|c| c.outcome == Outcome::Fail)
    }

    pub fn render_markdown(&self) -> String {
        let p = self.options.params;
        let mut out = String::new();
        writeln!(out, "# Verification report").unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "delta = {}, n = {}, seed = {}, samples = {}",
            p.delta(),
            p.levels(),
            self.options.seed,
            self.options.samples
        )
        .unwrap();
        writeln!(out).unwrap();
        let count = |o| self.checks.iter().filter(|c| c.outcome == o).count();
        writeln!(
            out,
            "Result: **{}** ({} passed, {} failed, {} skipped)",
            if self.passed() { "PASS" } else { "FAIL" },
            count(Outcome::Pass),
            count(Outcome::Fail),
            count(Outcome::Skipped)
        )
        .unwrap();
        let mut section = "";
        for c in &self.checks {
            if c.section != section {
                section = c.section;
                writeln!(out, "\n## {section}\n").unwrap();
                writeln!(out, "| status | check | detail |").unwrap();
                writeln!(out, "|---|---|---|").unwrap();
            }
            writeln!(
                out,
                "| {} | {} | {} |",
                c.outcome.as_str(),
                c.name,
                c.detail.replace('|', "\\|")
            )
            .unwrap();
        }
        if !self.notes.is_empty() {
            writeln!(out, "\n## Reference formulas not adopted").unwrap();
            for note in &self.notes {
                writeln!(out, "\n### {}\n", note.title).unwrap();
                for line in &note.lines {
                    writeln!(out, "- {line}").unwrap();
                }
            }
        }
        out
    }
}

struct Recorder {
    section: &'static str,
    checks: Vec<VerifyCheck>,
}

impl Recorder {
    fn section(&mut self, name: &'static str) {
        self.section = name;
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(VerifyCheck {
            section: self.section,
            name: name.into(),
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            detail: detail.into(),
        });
    }

    /// Records an `Err` as a failed check carrying the error message.
    fn check_result(&mut self, name: impl Into<String>, result: Result<(bool, String)>) {
        match result {
            Ok((passed, detail)) => self.check(name, passed, detail),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }

    fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.checks.push(VerifyCheck {
            section: self.section,
            name: name.into(),
            outcome: Outcome::Skipped,
            detail: reason.into(),
        });
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn sig(x: f64) -> String {
    fmt_sig(x, 12)
}

/// Runs every check for `options.params`. Only generation failures are
/// returned as errors; everything else is recorded in the report.
pub fn run_verification(options: VerifyOptions) -> Result<VerificationReport> {
    let params = options.params;
    let (delta, n) = (params.delta(), params.levels());
    let mut rec = Recorder {
        section: "",
        checks: Vec::new(),
    };

    rec.section("Graph");
    let mut level_mismatch = Vec::new();
    let mut odd_strength = Vec::new();
    let graph = generate_each(params, |g| {
        let p = params.at_level(g.level()).expect("lower level");
        let got = census(g);
        if expected_census(p).ok() != Some(got) {
            level_mismatch.push(g.level());
        }
        if g.strengths().iter().any(|s| s % 2 != 0) {
            odd_strength.push(g.level());
        }
    })?;
    rec.check(
        "census equals closed forms at every level",
        level_mismatch.is_empty(),
        if level_mismatch.is_empty() {
            let c = census(&graph);
            format!(
                "N={}, E={}, T={}, W={}",
                c.vertices, c.edges, c.triangles, c.total_weight
            )
        } else {
            format!("mismatch at levels {level_mismatch:?}")
        },
    );
    rec.check(
        "all strengths even at every level",
        odd_strength.is_empty(),
        if odd_strength.is_empty() {
            String::new()
        } else {
            format!("odd strengths at levels {odd_strength:?}")
        },
    );
    rec.check_result("graph invariants", graph.validate().map(|_| (true, String::new())));
    rec.check_result("per-vertex class values", check_vertex_classes(&graph, delta));
    rec.check_result("per-edge class weights", check_edge_classes(&graph, delta));
    rec.check_result(
        "class table balances",
        degree_classes(params).and_then(|t| t.check_balances()).map(|_| {
            (true, "sizes, strength, degree and weight mass match the census".into())
        }),
    );
    rec.check_result(
        "cumulative distributions",
        cumulative_distributions(params).map(|closed| {
            let measured = empirical_distributions(&graph);
            (
                closed == measured,
                format!(
                    "{} strength, {} degree, {} weight values",
                    closed.strength.len(),
                    closed.degree.len(),
                    closed.weight.len()
                ),
            )
        }),
    );

    rec.section("Clustering");
    check_clustering(&mut rec, &graph, delta, n);

    rec.section("Diameter");
    if graph.vertex_count() <= DIAMETER_LIMIT {
        let d = diameter(&graph);
        rec.check(
            "breadth-first diameter equals 2n+1 (1 at n=0)",
            d == diameter_closed(n),
            format!("measured {d}, closed {}", diameter_closed(n)),
        );
    } else {
        rec.skip(
            "breadth-first diameter",
            format!("N = {} exceeds {DIAMETER_LIMIT}", graph.vertex_count()),
        );
    }

    rec.section("Degree correlations");
    if n == 0 {
        rec.skip("closed class forms", "no class with birth >= 1 at n = 0");
    } else {
        match correlation_report(&graph, delta) {
            Ok(report) => {
                let dev = report.max_deviation();
                rec.check(
                    "closed class forms equal class averages",
                    dev <= 1e-9,
                    format!("max deviation {dev:e}"),
                );
                rec.check(
                    "k_nn non-increasing across classes",
                    report.knn_non_increasing(),
                    "",
                );
                rec.check(
                    "weighted k_nn non-decreasing across classes",
                    report.knnw_non_decreasing(),
                    "",
                );
            }
            Err(e) => rec.check("correlation report", false, format!("error: {e}")),
        }
    }

    rec.section("Spectra");
    check_spectra(&mut rec, &graph, delta, n);

    rec.section("Hitting time");
    check_hitting(&mut rec, &graph, options);

    rec.section("Spanning trees");
    check_trees(&mut rec, &graph, params);

    Ok(VerificationReport {
        options,
        checks: rec.checks,
        notes: formula_notes(&graph, delta, n),
    })
}

fn check_vertex_classes(graph: &WeightedGraph, delta: u64) -> Result<(bool, String)> {
    let n = graph.level();
    let mut bad = 0usize;
    for v in graph.vertices() {
        let b = graph.birth(v);
        if graph.strength(v) != closed_strength(delta, n, b)?
            || graph.degree(v) as u64 != closed_degree(delta, n, b)?
        {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!("{bad} of {} vertices differ", graph.vertex_count()),
    ))
}

fn check_edge_classes(graph: &WeightedGraph, delta: u64) -> Result<(bool, String)> {
    let n = graph.level();
    let mut bad = 0usize;
    for (u, v, w) in graph.edges() {
        let born = graph.birth(u).max(graph.birth(v));
        if w != closed_edge_weight(delta, n, born)? {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!("{bad} of {} edges differ", graph.edge_count()),
    ))
}

fn check_clustering(rec: &mut Recorder, graph: &WeightedGraph, delta: u64, n: u32) {
    let all = clustering_all(graph);
    let mut bad_plain = 0usize;
    let mut bad_weighted = 0usize;
    let mut undefined = 0usize;
    for (v, c) in all.iter().enumerate() {
        let Some(c) = c else {
            undefined += 1;
            continue;
        };
        let expect = Rational::new(1, graph.degree(v as u32) as u128 - 1);
        bad_plain += usize::from(c.plain != expect);
        bad_weighted += usize::from(c.weighted != expect);
    }
    rec.check(
        "local clustering equals 1/(k-1)",
        bad_plain == 0 && undefined == 0,
        format!("{bad_plain} differ, {undefined} undefined"),
    );
    rec.check(
        "weighted clustering equals 1/(k-1)",
        bad_weighted == 0 && undefined == 0,
        format!("{bad_weighted} differ"),
    );
    let triangles = vertex_triangles(graph);
    let bad = graph
        .vertices()
        .filter(|&v| graph.degree(v) as u64 != 2 * triangles[v as usize])
        .count();
    rec.check("k = 2 triangles at every vertex", bad == 0, format!("{bad} differ"));
    let closed = global_clustering_closed(delta, n);
    let measured = global_clustering_empirical(graph);
    rec.check(
        "average clustering closed form equals measured mean",
        (closed - measured).abs() <= 1e-12,
        format!("closed {}, measured {}", sig(closed), sig(measured)),
    );
}

fn check_spectra(rec: &mut Recorder, graph: &WeightedGraph, delta: u64, n: u32) {
    let spec = match transition_spectrum(delta, n) {
        Ok(s) => s,
        Err(e) => {
            rec.check("transition spectrum recursion", false, format!("error: {e}"));
            return;
        }
    };
    rec.check(
        "transition spectrum recursion",
        true,
        format!("{} distinct values", spec.entries.len()),
    );
    match spectrum_checks(&spec, delta, Some(graph)) {
        Ok(report) => {
            for c in report.checks {
                rec.check(c.name, c.passed, c.detail);
            }
        }
        Err(e) => rec.check("trace identities", false, format!("error: {e}")),
    }
    let ones = spec.multiplicity_of(1.0);
    rec.check("eigenvalue 1 is simple", ones == 1, format!("multiplicity {ones}"));
    rec.check_result(
        "Laplacian spectrum with sum/product identities",
        laplacian_spectrum(delta, n).map(|lap| {
            let zeros = lap.multiplicity_of(0.0);
            (
                zeros == 1 && lap.kind == SpectrumKind::Laplacian,
                format!("zero eigenvalue multiplicity {zeros}"),
            )
        }),
    );
    if graph.vertex_count() <= DENSE_ORACLE_LIMIT {
        rec.check_result(
            "dense Jacobi eigenvalues match the recursion",
            normalized_adjacency(graph)
                .and_then(|m| dense_eigenvalues(&m))
                .and_then(|dense| max_deviation(&spec, &dense))
                .map(|dev| (dev <= 1e-8, format!("max deviation {dev:e}"))),
        );
    } else {
        rec.skip(
            "dense Jacobi eigenvalues",
            format!("N = {} exceeds {DENSE_ORACLE_LIMIT}", graph.vertex_count()),
        );
    }
    let level = n.max(1);
    rec.check_result(
        format!("-1/2 multiplicity: closed form fits the vertex count at level {level}"),
        (|| {
            let vertices = expected_census(ModelParams::new(delta, level)?)?.vertices;
            let spec = transition_spectrum(delta, level)?;
            let others = spec.total_multiplicity() - spec.multiplicity_of(-0.5);
            let corrected = mult_minus_half(delta, level)?;
            let printed = mult_minus_half_printed(delta, level)?;
            Ok((
                others + corrected == vertices && others + printed != vertices,
                format!(
                    "N = {vertices}; with {corrected}: sum {}; with exponent n+1 ({printed}): sum {}",
                    others + corrected,
                    others + printed
                ),
            ))
        })(),
    );
}

fn check_hitting(rec: &mut Recorder, graph: &WeightedGraph, options: VerifyOptions) {
    let params = options.params;
    let n = params.levels();
    let mc = (n <= MONTE_CARLO_MAX_LEVEL).then_some((options.samples, options.seed));
    let report = match hitting_report(params, Some(graph), mc) {
        Ok(r) => r,
        Err(e) => {
            rec.check("hitting time routes", false, format!("error: {e}"));
            return;
        }
    };
    let closed = report.closed_form;
    let r = rel(report.recursive, closed);
    rec.check(
        "closed form equals recursion",
        r <= 1e-12,
        format!("{} (rel {r:e})", sig(closed)),
    );
    let r = rel(report.spectral, closed);
    rec.check(
        "closed form equals Laplacian eigenvalue sum",
        r <= 1e-9,
        format!("spectral {} (rel {r:e})", sig(report.spectral)),
    );
    match report.linear_solve {
        Some(x) => {
            let r = rel(x, closed);
            rec.check(
                "closed form equals absorbing-chain solve",
                r <= 1e-6,
                format!("solve {} (rel {r:e})", sig(x)),
            );
        }
        None => rec.skip(
            "absorbing-chain solve",
            format!("N = {} exceeds {LINEAR_SOLVE_LIMIT}", graph.vertex_count()),
        ),
    }
    match report.monte_carlo {
        Some(m) => rec.check(
            "simulation within 3 standard errors",
            m.within(closed, 3.0),
            format!(
                "mean {} +- {} over {} walks",
                sig(m.mean),
                sig(m.std_error),
                m.samples
            ),
        ),
        None => rec.skip(
            "simulation",
            format!("runs only for n <= {MONTE_CARLO_MAX_LEVEL}"),
        ),
    }
    if params.delta() == 1 && (4..=8).contains(&n) {
        let ratio = closed / graph.vertex_count() as f64;
        rec.check(
            "H/N within [1.0, 1.4]",
            (1.0..=1.4).contains(&ratio),
            format!("H/N = {}", sig(ratio)),
        );
    }
}

fn check_trees(rec: &mut Recorder, graph: &WeightedGraph, params: ModelParams) {
    let (delta, n) = (params.delta(), params.levels());
    let closed = match tree_count_closed(params) {
        Ok(t) => t,
        Err(e) => {
            rec.check("closed exponents", false, format!("error: {e}"));
            return;
        }
    };
    let (a, b) = closed.exponents;
    rec.check_result(
        "closed exponents equal triangle product",
        tree_count_triangles(params).map(|t| {
            (
                t.exponents == closed.exponents,
                format!("tau = 3^{a} * {}^{b}; product gives 3^{} * {}^{}", delta + 1, t.exponents.0, delta + 1, t.exponents.1),
            )
        }),
    );
    rec.check_result(
        "closed form equals spectral product",
        laplacian_spectrum(delta, n)
            .and_then(|lap| tree_count_spectral(graph, &lap))
            .map(|ln| {
                let r = (ln - closed.log_value).abs() / closed.log_value.max(1.0);
                (r <= 1e-9, format!("ln tau {} (rel {r:e})", sig(ln)))
            }),
    );
    if graph.vertex_count() <= KIRCHHOFF_LIMIT {
        rec.check_result(
            "closed form equals exact Laplacian cofactor",
            tree_count_kirchhoff(graph).map(|exact| {
                (
                    Some(&exact) == closed.exact.as_ref(),
                    format!("cofactor {exact}"),
                )
            }),
        );
    } else {
        rec.skip(
            "exact Laplacian cofactor",
            format!("N = {} exceeds {KIRCHHOFF_LIMIT}", graph.vertex_count()),
        );
    }
}

fn formula_notes(graph: &WeightedGraph, delta: u64, n: u32) -> Vec<FormulaNote> {
    let mut notes = Vec::new();
    let level = n.max(1);

    let mut lines = Vec::new();
    for i in 1..=level {
        if let (Ok(c), Ok(p), Ok(census)) = (
            mult_minus_half(delta, i),
            mult_minus_half_printed(delta, i),
            ModelParams::new(delta, i).and_then(expected_census),
        ) {
            lines.push(format!(
                "level {i}: N = {}, used (3(d+4)^n+2d+3)/(d+3) = {c}, exponent n+1 variant = {p}",
                census.vertices
            ));
        }
    }
    lines.push(
        "the exponent n+1 variant alone exceeds N, so the multiplicity sum cannot match".into(),
    );
    notes.push(FormulaNote {
        title: "Multiplicity of eigenvalue -1/2".into(),
        lines,
    });

    if let (Ok((minus, plus)), Ok(cm), Ok(cp)) = (
        theorem_multiplicities_printed(delta, level),
        mult_minus_half(delta, level),
        mult_plus_half(delta, level),
    ) {
        notes.push(FormulaNote {
            title: format!("Multiplicities of -1/2 and +1/2 at level {level}"),
            lines: vec![
                format!("reference pair: m(-1/2) = {minus}, m(+1/2) = {plus}"),
                format!("used: m(-1/2) = {cm}, m(+1/2) = {cp}"),
                "the -1/2 parent contributes only its non-fixed child (d+3)/(2(d+2))".into(),
                format!(
                    "Laplacian labels follow sigma = 1 - lambda: reference m(3/2) = {minus}, m(1/2) = {plus}; used m(3/2) = {cm}, m(1/2) = {cp}"
                ),
            ],
        });
    }

    notes.push(FormulaNote {
        title: "Average clustering".into(),
        lines: vec![
            format!(
                "class weight 6(d+4)^i: {} at n = 1, {} at n = {n}",
                sig(global_clustering_printed(delta, 1)),
                sig(global_clustering_printed(delta, n))
            ),
            format!(
                "class size 6(d+4)^(i-1): {} at n = 1, {} at n = {n}",
                sig(global_clustering_closed(delta, 1)),
                sig(global_clustering_closed(delta, n))
            ),
            "a mean of coefficients in [0, 1] cannot exceed 1".into(),
        ],
    });

    if n >= 1 {
        if let Ok(report) = correlation_report(graph, delta) {
            let mut lines = Vec::new();
            let (mut gap, mut gap_w) = (0.0f64, 0.0f64);
            for r in report.rows.iter().filter(|r| r.flag == CorrelationFlag::Ok) {
                let k = r.degree as f64;
                let knn_k = knn_printed_degree_form(delta, n, k);
                let knnw_k = knnw_printed_degree_form(delta, n, k);
                let (c, cw) = (r.knn_closed.unwrap_or(f64::NAN), r.knnw_closed.unwrap_or(f64::NAN));
                gap = gap.max((knn_k - c).abs());
                gap_w = gap_w.max((knnw_k - cw).abs());
                lines.push(format!(
                    "k = {}: k_nn class {} / degree form {}; weighted class {} / degree form {}",
                    r.degree,
                    sig(c),
                    sig(knn_k),
                    sig(cw),
                    sig(knnw_k)
                ));
            }
            lines.push(format!(
                "largest gap: k_nn {gap:e}, weighted k_nn {gap_w:e}; class forms are checked, degree forms only reported"
            ));
            notes.push(FormulaNote {
                title: "Degree-parameterized correlation forms".into(),
                lines,
            });
        }
    }
    notes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options(delta: u64, n: u32) -> VerifyOptions {
        VerifyOptions {
            params: ModelParams::new(delta, n).unwrap(),
            samples: 20_000,
            seed: 42,
        }
    }

    #[test]
    fn small_points_pass() {
        for (delta, n) in [(1, 0), (1, 1), (2, 2)] {
            let report = run_verification(options(delta, n)).unwrap();
            let failed: Vec<_> = report.failures().collect();
            assert!(failed.is_empty(), "{failed:?}");
        }
    }

    #[test]
    fn report_mentions_rejected_formulas() {
        let text = run_verification(options(1, 1)).unwrap().render_markdown();
        assert!(text.contains("Result: **PASS**"));
        assert!(text.contains("exponent n+1 variant = 20"));
        assert!(text.contains("3.44444444444"));
    }

    #[test]
    fn rendering_is_repeatable() {
        let a = run_verification(options(1, 2)).unwrap().render_markdown();
        let b = run_verification(options(1, 2)).unwrap().render_markdown();
        assert_eq!(a, b);
    }
}
