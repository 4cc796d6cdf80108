//! End-to-end runs of the `fieldnorm` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fieldnorm")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PAPERS: &str = "paper_id,field_id,pub_year,doc_type,citations
a1,bio,2020,article,0
a2,bio,2020,article,2
a3,bio,2020,article,4
a4,bio,2020,article,10
b1,math,2020,article,1
b2,math,2020,article,1
b3,math,2020,article,3
b4,math,2020,article,7
";

fn papers(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("papers.csv");
    fs::write(&path, PAPERS).unwrap();
    path
}

#[test]
fn table1_golden_to_stdout() {
    let (code, out, _) = run(&["table1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "citations,n_papers,k,m_score,rank,percentile");
    assert_eq!(lines.len(), 23);
    assert_eq!(lines[1], "0,9,0.07,0.00,9,17.31");
    assert_eq!(lines[22], "200,1,0.07,13.96,52,100.00");
}

#[test]
fn normalize_then_aggregate_linear_scores() {
    let dir = tempfile::tempdir().unwrap();
    let input = papers(dir.path());
    let out = dir.path().join("out");
    let (code, _, err) = run(&["normalize", "--input", s(&input), "--method", "mean", "--output", s(&out)]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("LINEAR"));
    let scores = fs::read_to_string(out.join("scores.csv")).unwrap();
    assert!(scores.starts_with("paper_id,method,score,linearity_class\n"), "{scores}");
    assert!(scores.contains("a4,mean,2.5,linear"));

    let group = dir.path().join("group.txt");
    fs::write(&group, "paper_id\na3\na4\n").unwrap();
    let (code, stdout, err) = run(&["aggregate", "--input", s(&out.join("scores.csv")), "--group", s(&group)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(stdout.trim(), "sum\t3.5\tn=2");
}

#[test]
fn nonlinear_aggregation_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let input = papers(dir.path());
    let (code, stdout, err) = run(&["normalize", "--input", s(&input), "--method", "percentile"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("NONLINEAR"));
    let scores = dir.path().join("scores.csv");
    fs::write(&scores, stdout).unwrap();
    let (code, stdout, err) = run(&["aggregate", "--input", s(&scores), "--stat", "mean"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(err.contains("percentile-cp-in") && err.contains("nonlinear"), "{err}");
}

#[test]
fn relabelled_scores_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(&scores, "paper_id,method,score,linearity_class\na,percentile-cp-in,50,linear\n").unwrap();
    let (code, _, _) = run(&["aggregate", "--input", s(&scores)]);
    assert_eq!(code, 2);
}

#[test]
fn citing_side_scores_need_acknowledgement() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("events.csv");
    fs::write(&events, "focal_id,a_i,r_i,p_i\nx,10,20,0.5\nx,5,10,1\ny,2,4,0.25\n").unwrap();
    let out = dir.path().join("out");
    let (code, _, err) =
        run(&["normalize", "--events", s(&events), "--method", "sncs", "--mode", "3", "--output", s(&out)]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("OUTSIDE_CATEGORY"), "{err}");
    let scores = out.join("scores.csv");
    let (code, _, err) = run(&["aggregate", "--input", s(&scores)]);
    assert_eq!(code, 2, "{err}");
    let (code, stdout, err) = run(&["aggregate", "--input", s(&scores), "--acknowledge-outside-category"]);
    assert_eq!(code, 0, "{err}");
    // x: 1/(0.5·20) + 1/(1·10) = 0.2, y: 1/(0.25·4) = 1
    let value: f64 = stdout.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.2).abs() < 1e-12);
    assert!(err.contains("advisory"), "{err}");
}

#[test]
fn classify_reports_verdicts_and_mapping() {
    let dir = tempfile::tempdir().unwrap();
    let input = papers(dir.path());
    let out = dir.path().join("out");
    let (code, _, err) =
        run(&["classify", "--input", s(&input), "--method", "nlcs", "--cell", "field", "--output", s(&out)]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("observed verdict: NONLINEAR"), "{err}");
    let table = fs::read_to_string(out.join("classification.csv")).unwrap();
    assert!(table.starts_with("cell,method,verdict,k,b,max_residual\n"));
    assert_eq!(table.lines().filter(|l| l.contains(",nonlinear,")).count(), 2);
    let mapping = fs::read_to_string(out.join("mapping.csv")).unwrap();
    // bio has 4 distinct counts, math has 3
    assert_eq!(mapping.lines().count(), 1 + 4 + 3);

    let (code, _, err) = run(&["classify", "--input", s(&input), "--method", "z-score"]);
    assert_eq!(code, 0);
    assert!(err.contains("observed verdict: LINEAR"), "{err}");
}

#[test]
fn fairness_writes_all_reports() {
    let dir = tempfile::tempdir().unwrap();
    let input = papers(dir.path());
    let out = dir.path().join("out");
    let (code, _, err) = run(&["fairness", "--input", s(&input), "--method", "raw", "--z", "25", "--output", s(&out)]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(out.join("fairness.csv")).unwrap();
    // 2 slots: a4 (10) and b4 (7)
    assert_eq!(csv, "field,n,top_count,proportion\nbio,4,1,25\nmath,4,1,25\n");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fairness.json")).unwrap()).unwrap();
    assert_eq!(json["slots"], 2);
    assert_eq!(json["linearity_class"], "linear");
    assert!(out.join("cdf.csv").exists());
}

#[test]
fn rcr_reads_its_own_input_format() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rcr.csv");
    fs::write(&input, "paper_id,acr,fcr,is_benchmark,citations\nb1,3,1,true,3\nb2,5,2,true,5\nq,0,4,false,9\n")
        .unwrap();
    let (code, stdout, err) = run(&["normalize", "--input", s(&input), "--method", "rcr"]);
    assert_eq!(code, 0, "{err}");
    // acr = 1 + 2·fcr, so ecr(q) = 9 and the score is 1
    assert!(stdout.contains("q,rcr,1,linear"), "{stdout}");
}

#[test]
fn generate_uses_spec_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"seed": 1, "fields": [
            {"field_id": "x", "count": 50, "family": "lognormal", "params": {"mu": 1.0, "sigma": 0.5}},
            {"field_id": "y", "count": 30, "family": "negative-binomial", "params": {"r": 2.0, "p": 0.4}}
        ]}"#,
    )
    .unwrap();
    let (code, a, _) = run(&["generate", "--spec", s(&spec)]);
    assert_eq!(code, 0);
    assert_eq!(a.lines().count(), 81);
    let (_, b, _) = run(&["generate", "--spec", s(&spec)]);
    let (_, c, _) = run(&["generate", "--spec", s(&spec), "--seed", "2"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn demo_prints_the_four_comparisons() {
    let (code, out, _) = run(&["demo-misuse"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with('(')).count(), 4, "{out}");
    assert!(out.contains("≠"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = papers(dir.path());
    // usage
    assert_eq!(run(&["normalize", "--input", s(&input)]).0, 64);
    assert_eq!(run(&["normalize", "--input", s(&input), "--method", "exchange-rate"]).0, 64);
    assert_eq!(run(&["normalize", "--input", s(&input), "--method", "bogus"]).0, 64);
    assert_eq!(run(&["fairness", "--input", s(&input), "--method", "raw", "--z", "0"]).0, 64);
    assert_eq!(run(&["normalize", "--input", "/no/such/file.csv", "--method", "mean"]).0, 64);
    // data
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "paper_id,field_id,pub_year,doc_type,citations\na,f,2020,article,x\n").unwrap();
    let (code, _, err) = run(&["normalize", "--input", s(&bad), "--method", "mean"]);
    assert_eq!(code, 65);
    assert!(err.contains("line 2"), "{err}");
    let zeros = dir.path().join("zeros.csv");
    fs::write(&zeros, "paper_id,field_id,pub_year,doc_type,citations\na,f,2020,article,0\nb,f,2020,article,0\n")
        .unwrap();
    assert_eq!(run(&["normalize", "--input", s(&zeros), "--method", "mean"]).0, 65);
    // help
    assert_eq!(run(&["--help"]).0, 0);
}
