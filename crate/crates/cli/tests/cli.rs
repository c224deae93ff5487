use std::fs;
use std::process::{Command, Output};

fn corona(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corona-net"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generate_prints_edge_list() {
    let out = corona(&["generate", "--delta", "1", "--levels", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# corona-net v1 delta=1 n=2"));
    let edges: Vec<&str> = lines.collect();
    assert_eq!(edges.len(), 57);
    assert_eq!(edges[0], "0\t1\t4");
}

#[test]
fn generate_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = corona(&["generate", "-d", "2", "-n", "1", "-o", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let vertices = fs::read_to_string(dir.path().join("vertices.csv")).unwrap();
    assert!(vertices.starts_with("vertex,birth,degree,strength\n0,0,4,"));
    assert_eq!(vertices.lines().count(), 1 + 9);
    let edges = fs::read_to_string(dir.path().join("edges.tsv")).unwrap();
    assert_eq!(edges.lines().count(), 1 + 12);
}

#[test]
fn hitting_single_methods_print_one_number() {
    let out = corona(&["hitting", "--delta", "1", "--levels", "1", "--method", "closed"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "10.5333333333333\n");
    for method in ["recursive", "spectral", "solve"] {
        let out = corona(&["hitting", "-d", "1", "-n", "1", "--method", method]);
        let value: f64 = stdout(&out).trim().parse().unwrap();
        assert!((value - 158.0 / 15.0).abs() < 1e-6, "{method}: {value}");
    }
}

#[test]
fn hitting_json_has_documented_keys() {
    let out = corona(&["hitting", "-d", "1", "-n", "1", "--samples", "20000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let keys = [
        "delta", "n", "closed", "spectral", "linear_solve", "mc_mean", "mc_stderr",
        "mc_samples", "seed",
    ];
    let mut last = 0;
    for key in keys {
        let at = text.find(&format!("\"{key}\"")).unwrap_or_else(|| panic!("missing {key}"));
        assert!(at >= last, "{key} out of order");
        last = at;
    }
    assert!(text.contains("\"seed\": 42"));
}

#[test]
fn simulation_is_byte_stable_across_threads() {
    let args = ["hitting", "-d", "1", "-n", "2", "--method", "mc", "--samples", "30000"];
    let one = corona(&[&args[..], &["--threads", "1"]].concat());
    let two = corona(&[&args[..], &["--threads", "2"]].concat());
    let again = corona(&[&args[..], &["--threads", "1"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(one.stdout, again.stdout);
    let other_seed = corona(&[&args[..], &["--seed", "7"]].concat());
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn spectrum_methods_agree() {
    let rec = corona(&["spectrum", "-d", "1", "-n", "1"]);
    assert_eq!(
        stdout(&rec),
        "value,multiplicity\n-0.5,5\n0.166666666666667,1\n0.666666666666667,2\n1,1\n"
    );
    let lap = corona(&["spectrum", "-d", "1", "-n", "1", "--matrix", "laplacian"]);
    assert_eq!(
        stdout(&lap),
        "value,multiplicity\n0,1\n0.333333333333333,2\n0.833333333333333,1\n1.5,5\n"
    );
    let dense = corona(&["spectrum", "-d", "1", "-n", "1", "--method", "dense"]);
    let parse = |s: String| -> Vec<(f64, u64)> {
        s.lines()
            .skip(1)
            .map(|l| {
                let (v, m) = l.split_once(',').unwrap();
                (v.parse().unwrap(), m.parse().unwrap())
            })
            .collect()
    };
    let (a, b) = (parse(stdout(&rec)), parse(stdout(&dense)));
    assert_eq!(a.len(), b.len());
    for ((x, m), (y, k)) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-8);
        assert_eq!(m, k);
    }
}

#[test]
fn trees_outputs() {
    let out = corona(&["trees", "-d", "2", "-n", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"exact_tau\": \"729\""));
    let out = corona(&["trees", "-d", "1", "-n", "1", "--method", "kirchhoff"]);
    assert_eq!(stdout(&out), "324\n");
    let out = corona(&["trees", "-d", "1", "-n", "3", "--method", "kirchhoff"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stats_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = corona(&["stats", "-d", "1", "-n", "1", "-o", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();
    assert_eq!(
        read("distribution_strength.csv"),
        "value,count,p_cum\n2,6,1\n6,3,0.333333333333\n"
    );
    assert_eq!(read("distribution_weight.csv"), "value,count,p_cum\n1,9,1\n2,3,0.25\n");
    assert_eq!(
        read("classes.csv"),
        "birth,size,strength,degree,edge_weight\n0,3,6,4,2\n1,6,2,2,1\n"
    );
    let corr = read("correlations.csv");
    assert!(corr.starts_with("degree,knn_closed,knn_emp,knnw_closed,knnw_emp,flag\n2,3,3,3,3,ok\n"));
    assert!(corr.trim_end().ends_with(",seed"));
    assert!(read("summary.json").contains("\"diameter\": 3"));
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("VERIFICATION.md");
    let out = corona(&[
        "verify", "--delta", "1", "--levels", "3", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(path).unwrap();
    assert!(report.contains("Result: **PASS**"));
    assert!(report.contains("exponent n+1 variant = 20"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(corona(&["generate", "--delta", "0", "--levels", "1"]).status.code(), Some(2));
    assert_eq!(corona(&["generate", "--levels", "1"]).status.code(), Some(2));
    assert_eq!(corona(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        corona(&["hitting", "-d", "1", "-n", "1", "--method", "mc", "--samples", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(corona(&["generate", "-d", "1", "-n", "60"]).status.code(), Some(2));
}

#[test]
fn help_documents_formats_and_defaults() {
    let out = corona(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("hitting.json"));
    assert!(text.contains("value,multiplicity"));
    let out = corona(&["hitting", "--help"]);
    let text = stdout(&out);
    assert!(text.contains("[default: 42]"));
    assert!(text.contains("[default: 100000]"));
}
