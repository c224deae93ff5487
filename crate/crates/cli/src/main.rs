use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use corona_core::analytics::{
    correlation_report, cumulative_distributions, degree_classes, diameter, diameter_closed,
    distribution_exponents, global_clustering_closed, global_clustering_empirical,
};
use corona_core::dynamics::{
    hitting_report, hitting_time_closed, hitting_time_linear_solve, hitting_time_monte_carlo,
    hitting_time_recursive, hitting_time_spectral, tree_count_closed, tree_count_kirchhoff,
    tree_count_spectral, tree_count_triangles, LINEAR_SOLVE_LIMIT,
};
use corona_core::output::{
    fmt_sig, render_classes, render_correlations, render_distribution, render_edge_list,
    render_hitting_json, render_spectrum, render_summary_json, render_trees_json,
    render_vertices, StatsSummary, REAL_DIGITS,
};
use corona_core::spectra::{
    dense_eigenvalues, group_eigenvalues, laplacian_spectrum, normalized_adjacency,
    normalized_laplacian, transition_spectrum, SpectrumKind,
};
use corona_core::verify::{run_verification, VerifyOptions, DIAMETER_LIMIT, MONTE_CARLO_MAX_LEVEL};
use corona_core::{census, generate, CoronaError, ModelParams};

const FORMATS: &str = "\
Output formats:
  edges.tsv        '# corona-net v1 delta=<D> n=<N>' then 'u<TAB>v<TAB>w', u < v, ascending
  vertices.csv     vertex,birth,degree,strength
  distribution_<strength|degree|weight>.csv
                   value,count,p_cum (p_cum = share of elements >= value, 12 significant digits)
  classes.csv      birth,size,strength,degree,edge_weight
  correlations.csv degree,knn_closed,knn_emp,knnw_closed,knnw_emp,flag (flag: ok|seed|mixed)
  summary.json     census, exponents, clustering and diameter
  spectrum.csv     value,multiplicity (15 significant digits, ascending)
  hitting.json     delta,n,closed,spectral,linear_solve,mc_mean,mc_stderr,mc_samples,seed
  trees.json       delta,n,a,b,log_tau,exact_tau (tau = 3^a (delta+1)^b; exact_tau is a
                   decimal string, or null when an exponent exceeds 10000)
  VERIFICATION.md  per-check PASS/FAIL/SKIP table and the reference formulas not adopted

Exit codes: 0 success, 1 verification failure or internal error, 2 usage error.";

#[derive(Parser, Debug)]
#[command(
    name = "corona-net",
    version,
    about = "Generate and analyze weighted corona networks",
    after_help = FORMATS
)]
struct Cli {
    /// Worker threads for parallel steps (default: all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Model {
    /// Weight reinforcement factor, at least 1
    #[arg(short, long)]
    delta: u64,
    /// Number of growth iterations
    #[arg(short = 'n', long)]
    levels: u32,
}

impl Model {
    fn params(self) -> corona_core::Result<ModelParams> {
        ModelParams::new(self.delta, self.levels)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Edge list and vertex table of the generated graph
    Generate {
        #[command(flatten)]
        model: Model,
        /// Directory for edges.tsv and vertices.csv; without it one table
        /// goes to stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Table printed to stdout when no output directory is given
        #[arg(long, value_enum, default_value_t = GraphTable::Edges)]
        format: GraphTable,
    },
    /// Distribution, class and correlation tables plus a JSON summary
    Stats {
        #[command(flatten)]
        model: Model,
        /// Directory for the CSV tables and summary.json; without it the
        /// summary goes to stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues of the transition or normalized Laplacian matrix
    Spectrum {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_enum, default_value_t = Matrix::Transition)]
        matrix: Matrix,
        /// `dense` diagonalizes the generated graph (at most 2000 vertices)
        #[arg(long, value_enum, default_value_t = SpectrumMethod::Recursive)]
        method: SpectrumMethod,
        /// Output file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Mean hitting time of the random walk
    Hitting {
        #[command(flatten)]
        model: Model,
        /// A single method prints one number; `all` prints hitting.json
        #[arg(long, value_enum, default_value_t = HittingMethod::All)]
        method: HittingMethod,
        /// Random seed for the simulation
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of simulated walks
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Output file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weighted spanning-tree count
    Trees {
        #[command(flatten)]
        model: Model,
        /// `closed` and `triangles` print trees.json, `spectral` prints
        /// ln tau, `kirchhoff` prints the exact count (at most 64 vertices),
        /// `all` cross-checks every applicable route and prints trees.json
        #[arg(long, value_enum, default_value_t = TreeMethod::All)]
        method: TreeMethod,
        /// Output file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the full invariant suite; exit 0 only if every check passes
    Verify {
        #[command(flatten)]
        model: Model,
        /// Random seed for the simulation
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of simulated walks
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Report file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum GraphTable {
    Edges,
    Vertices,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Matrix {
    Transition,
    Laplacian,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpectrumMethod {
    Recursive,
    Dense,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum HittingMethod {
    Closed,
    Recursive,
    Spectral,
    Solve,
    Mc,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TreeMethod {
    Closed,
    Triangles,
    Spectral,
    Kirchhoff,
    All,
}

/// Failures that map to a non-zero exit code.
enum Failure {
    Core(CoronaError),
    Io(io::Error),
    Verification(String),
}

impl From<CoronaError> for Failure {
    fn from(e: CoronaError) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(output: Option<&Path>, text: &str) -> io::Result<()> {
    match output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn write_all(dir: &Path, files: &[(&str, String)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in files {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn run_generate(model: Model, output: Option<&Path>, format: GraphTable) -> Outcome {
    let graph = generate(model.params()?)?;
    match output {
        Some(dir) => write_all(
            dir,
            &[
                ("edges.tsv", render_edge_list(&graph, model.delta)),
                ("vertices.csv", render_vertices(&graph)),
            ],
        )?,
        None => {
            let text = match format {
                GraphTable::Edges => render_edge_list(&graph, model.delta),
                GraphTable::Vertices => render_vertices(&graph),
            };
            emit(None, &text)?;
        }
    }
    Ok(())
}

fn run_stats(model: Model, output: Option<&Path>) -> Outcome {
    let params = model.params()?;
    let graph = generate(params)?;
    let exponents = distribution_exponents(model.delta);
    let summary = StatsSummary {
        delta: model.delta,
        n: model.levels,
        census: census(&graph),
        gamma_strength: exponents.strength,
        gamma_degree: exponents.degree,
        gamma_weight: exponents.weight,
        clustering_closed: global_clustering_closed(model.delta, model.levels),
        clustering_empirical: global_clustering_empirical(&graph),
        diameter: (graph.vertex_count() <= DIAMETER_LIMIT).then(|| diameter(&graph)),
        diameter_closed: diameter_closed(model.levels),
    };
    let summary = render_summary_json(&summary);
    let Some(dir) = output else {
        emit(None, &summary)?;
        return Ok(());
    };
    let dists = cumulative_distributions(params)?;
    write_all(
        dir,
        &[
            ("distribution_strength.csv", render_distribution(&dists.strength)),
            ("distribution_degree.csv", render_distribution(&dists.degree)),
            ("distribution_weight.csv", render_distribution(&dists.weight)),
            ("classes.csv", render_classes(&degree_classes(params)?)),
            (
                "correlations.csv",
                render_correlations(&correlation_report(&graph, model.delta)?),
            ),
            ("summary.json", summary),
        ],
    )?;
    Ok(())
}

fn run_spectrum(model: Model, matrix: Matrix, method: SpectrumMethod, output: Option<&Path>) -> Outcome {
    let params = model.params()?;
    let spec = match method {
        SpectrumMethod::Recursive => match matrix {
            Matrix::Transition => transition_spectrum(model.delta, model.levels)?,
            Matrix::Laplacian => laplacian_spectrum(model.delta, model.levels)?,
        },
        SpectrumMethod::Dense => {
            let graph = generate(params)?;
            let (m, kind) = match matrix {
                Matrix::Transition => (normalized_adjacency(&graph)?, SpectrumKind::Transition),
                Matrix::Laplacian => (normalized_laplacian(&graph)?, SpectrumKind::Laplacian),
            };
            group_eigenvalues(model.levels, kind, &dense_eigenvalues(&m)?, 1e-9)
        }
    };
    emit(output, &render_spectrum(&spec))?;
    Ok(())
}

fn number_line(x: f64) -> String {
    format!("{}\n", fmt_sig(x, REAL_DIGITS))
}

fn run_hitting(
    model: Model,
    method: HittingMethod,
    seed: u64,
    samples: u64,
    output: Option<&Path>,
) -> Outcome {
    let params = model.params()?;
    let (d, n) = (model.delta, model.levels);
    let text = match method {
        HittingMethod::Closed => number_line(hitting_time_closed(d, n)),
        HittingMethod::Recursive => number_line(hitting_time_recursive(d, n)),
        HittingMethod::Spectral => {
            number_line(hitting_time_spectral(&laplacian_spectrum(d, n)?)?)
        }
        HittingMethod::Solve => number_line(hitting_time_linear_solve(&generate(params)?)?),
        HittingMethod::Mc => {
            let mc = hitting_time_monte_carlo(&generate(params)?, 0, samples, seed)?;
            format!(
                "{} {}\n",
                fmt_sig(mc.mean, REAL_DIGITS),
                fmt_sig(mc.std_error, REAL_DIGITS)
            )
        }
        HittingMethod::All => {
            let vertices = corona_core::expected_census(params)?.vertices;
            let small = vertices <= LINEAR_SOLVE_LIMIT as u64;
            let graph = if small || n <= MONTE_CARLO_MAX_LEVEL {
                Some(generate(params)?)
            } else {
                None
            };
            let mc = (n <= MONTE_CARLO_MAX_LEVEL).then_some((samples, seed));
            let report = hitting_report(params, graph.as_ref(), mc)?;
            if !report.consistent() {
                emit(output, &render_hitting_json(d, &report, seed))?;
                return Err(Failure::Verification(
                    "hitting-time routes disagree".into(),
                ));
            }
            render_hitting_json(d, &report, seed)
        }
    };
    emit(output, &text)?;
    Ok(())
}

fn run_trees(model: Model, method: TreeMethod, output: Option<&Path>) -> Outcome {
    let params = model.params()?;
    let n = model.levels;
    let text = match method {
        TreeMethod::Closed => render_trees_json(n, &tree_count_closed(params)?),
        TreeMethod::Triangles => render_trees_json(n, &tree_count_triangles(params)?),
        TreeMethod::Spectral => {
            let graph = generate(params)?;
            number_line(tree_count_spectral(
                &graph,
                &laplacian_spectrum(model.delta, n)?,
            )?)
        }
        TreeMethod::Kirchhoff => format!("{}\n", tree_count_kirchhoff(&generate(params)?)?),
        TreeMethod::All => {
            let closed = tree_count_closed(params)?;
            let mut problems = Vec::new();
            if tree_count_triangles(params)?.exponents != closed.exponents {
                problems.push("triangle product");
            }
            let graph = generate(params)?;
            let ln = tree_count_spectral(&graph, &laplacian_spectrum(model.delta, n)?)?;
            if (ln - closed.log_value).abs() > 1e-9 * closed.log_value.max(1.0) {
                problems.push("spectral product");
            }
            if graph.vertex_count() <= corona_core::dynamics::KIRCHHOFF_LIMIT
                && closed.exact.as_ref() != Some(&tree_count_kirchhoff(&graph)?)
            {
                problems.push("Laplacian cofactor");
            }
            if !problems.is_empty() {
                return Err(Failure::Verification(format!(
                    "tree count disagrees with: {}",
                    problems.join(", ")
                )));
            }
            render_trees_json(n, &closed)
        }
    };
    emit(output, &text)?;
    Ok(())
}

fn run_verify(model: Model, seed: u64, samples: u64, output: Option<&Path>) -> Outcome {
    if samples == 0 {
        return Err(CoronaError::InvalidParams("samples must be at least 1".into()).into());
    }
    let report = run_verification(VerifyOptions {
        params: model.params()?,
        samples,
        seed,
    })?;
    emit(output, &report.render_markdown())?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(format!(
            "failed checks: {}",
            names.join("; ")
        )))
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Generate {
            model,
            output,
            format,
        } => run_generate(model, output.as_deref(), format),
        Command::Stats { model, output } => run_stats(model, output.as_deref()),
        Command::Spectrum {
            model,
            matrix,
            method,
            output,
        } => run_spectrum(model, matrix, method, output.as_deref()),
        Command::Hitting {
            model,
            method,
            seed,
            samples,
            output,
        } => run_hitting(model, method, seed, samples, output.as_deref()),
        Command::Trees {
            model,
            method,
            output,
        } => run_trees(model, method, output.as_deref()),
        Command::Verify {
            model,
            seed,
            samples,
            output,
        } => run_verify(model, seed, samples, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
