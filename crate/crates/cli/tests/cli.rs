use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fqfd_core::fuzzy::RelationshipDegree;
use fqfd_core::hoq::Requirement;
use fqfd_core::project::{bundled_project, HoqProject};

fn fqfd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqfd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn bundled(dir: &Path) -> String {
    write(dir, "bundled.json", &bundled_project().to_json()).to_string_lossy().into_owned()
}

fn with_criteria(rows: Vec<Vec<f64>>) -> HoqProject {
    let mut p = bundled_project();
    p.respondents.truncate(1);
    p.respondents[0].criteria_matrix = rows;
    p
}

fn single_cell() -> HoqProject {
    let mut p = HoqProject::blank(
        "single",
        vec![Requirement::new("CR1", "need")],
        vec![Requirement::new("TR1", "feature")],
        vec![Requirement::new("C1", "criterion")],
    );
    p.relationships[0][0] = RelationshipDegree::Strong;
    p
}

#[test]
fn validate_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let ok = fqfd(&["validate", &bundled(dir.path())]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("valid: "));

    let mut p = bundled_project();
    p.relationships.pop();
    p.trs[2].code = "TR1".into();
    let bad = write(dir.path(), "bad.json", &p.to_json());
    let o = fqfd(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let err = stderr(&o);
    assert!(err.contains("trs[2].code") && err.contains("relationships"), "{err}");

    let missing = fqfd(&["validate", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(66));

    let future = write(dir.path(), "future.json", "{\"schema_version\": 999}");
    assert_eq!(fqfd(&["validate", future.to_str().unwrap()]).status.code(), Some(65));
    let broken = write(dir.path(), "broken.json", "{\"schema_version\": 1,");
    assert_eq!(fqfd(&["validate", broken.to_str().unwrap()]).status.code(), Some(65));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(fqfd(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(fqfd(&["rank"]).status.code(), Some(64));
    assert_eq!(fqfd(&["ahp", "x.json", "--respondent", "R1", "--group"]).status.code(), Some(64));
    let help = fqfd(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sensitivity"));
}

#[test]
fn ahp_consistent_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let w = [4.0, 2.0, 1.0];
    let p = with_criteria((0..3).map(|i| (0..3).map(|j| w[i] / w[j]).collect()).collect());
    let path = write(dir.path(), "c.json", &p.to_json());
    let path = path.to_str().unwrap();
    let o = fqfd(&["ahp", path]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("criteria  lambda_max=3.0000  ci=0.0000  cr=0.0000"), "{text}");
    assert!(stderr(&o).is_empty());

    let weights = |method: &str| -> Vec<f64> {
        let o = fqfd(&["ahp", path, "--method", method, "--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["criteria"]["weights"]["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    };
    let (e, g) = (weights("eigenvector"), weights("rowgeomean"));
    for (a, b) in e.iter().zip(&g) {
        assert!((a - b).abs() < 1e-6);
    }
    assert!((e[0] - 4.0 / 7.0).abs() < 1e-6);
}

#[test]
fn inconsistent_judgments_warn_and_block_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let p = with_criteria(vec![vec![1.0, 3.0, 1.0], vec![1.0 / 3.0, 1.0, 3.0], vec![1.0, 1.0 / 3.0, 1.0]]);
    let path = write(dir.path(), "i.json", &p.to_json());
    let path = path.to_str().unwrap();
    let o = fqfd(&["ahp", path]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    assert!(err.contains("warning: criteria: CR=0.48 exceeds 0.10"), "{err}");
    assert!(stdout(&o).contains("withheld"));

    let r = fqfd(&["rank", path]);
    assert_eq!(r.status.code(), Some(3));
    assert!(stderr(&r).contains("InconsistentInput"));
    assert_eq!(fqfd(&["rank", path, "--allow-inconsistent"]).status.code(), Some(0));
}

#[test]
fn rank_single_cell_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "one.json", &single_cell().to_json());
    let o = fqfd(&["rank", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(0.7000, 1.0000, 1.4286)  1.0214"), "{text}");
}

#[test]
fn rank_bundled_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let project = bundled(dir.path());
    let plot = dir.path().join("plot.csv");
    let out = dir.path().join("report.json");
    let o = fqfd(&["rank", &project, "--plot-data", plot.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut ranks: Vec<usize> =
        text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap().parse().unwrap()).collect();
    assert_eq!(ranks.len(), 14);
    ranks.sort_unstable();
    assert_eq!(ranks, (1..=14).collect::<Vec<_>>());

    let plot_text = std::fs::read_to_string(&plot).unwrap();
    let values: Vec<f64> = plot_text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 14);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let json = fqfd(&["rank", &project, "--format", "json"]);
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&json.stdout).unwrap(), report);

    let csv_out = dir.path().join("report.csv");
    fqfd(&["rank", &project, "--out", csv_out.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&csv_out).unwrap().lines().count(), 15);

    let nowhere = dir.path().join("no/such/dir/plot.csv");
    let o = fqfd(&["rank", &project, "--plot-data", nowhere.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(73));
}

#[test]
fn sensitivity_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let project = bundled(dir.path());
    let args = ["sensitivity", &project, "--trials", "50", "--seed", "9", "--perturb-roof"];
    let a = fqfd(&args);
    let b = fqfd(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let hist = dir.path().join("h.csv");
    let rev = dir.path().join("r.csv");
    let o = fqfd(&[
        "sensitivity",
        &project,
        "--trials",
        "20",
        "--judgment-step-prob",
        "0",
        "--cell-flip-prob",
        "0",
        "--format",
        "json",
        "--histogram",
        hist.to_str().unwrap(),
        "--reversals",
        rev.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let baseline = v["baseline_ranks"].as_array().unwrap();
    for (j, f) in v["top1_frequency"].as_array().unwrap().iter().enumerate() {
        let want = if baseline[j] == 1 { 1.0 } else { 0.0 };
        assert_eq!(f.as_f64().unwrap(), want);
    }
    assert_eq!(std::fs::read_to_string(&hist).unwrap().lines().count(), 15);
    assert_eq!(std::fs::read_to_string(&rev).unwrap().lines().count(), 1 + 14 * 13 / 2);

    let bad = fqfd(&["sensitivity", &project, "--trials", "0"]);
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn import_tables() {
    let dir = tempfile::tempdir().unwrap();
    let upper = write(dir.path(), "m.csv", ",A,B,C\nA,1,3,1/2\nB,,1,4\nC,,,1\n");
    let o = fqfd(&["import", upper.to_str().unwrap(), "--kind", "pairwise-upper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][1][0].as_f64().unwrap(), 1.0 / 3.0);

    let grid = write(dir.path(), "g.tsv", "\tTR1\tTR2\nCR1\tS\t\nCR2\tX\tW\n");
    let o = fqfd(&["import", grid.to_str().unwrap(), "--kind", "relationships"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("UnknownLinguisticToken"));

    let missing = fqfd(&["import", "/nonexistent/t.csv", "--kind", "roof"]);
    assert_eq!(missing.status.code(), Some(66));
}

#[test]
fn bundled_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    assert_eq!(fqfd(&["bundled", "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let printed = fqfd(&["bundled"]);
    assert_eq!(std::fs::read(&out).unwrap(), printed.stdout);
}
