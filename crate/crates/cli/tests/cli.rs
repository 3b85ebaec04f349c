use std::io::Write;
use std::process::{Command, Output};

use galereg::classify::{ci_table, n4_family_lattice, n5_family_lattice, n6_family_lattice};
use galereg::searches::diagram_orbits;
use galereg::{Field, Lattice};
use galereg_cli::{analyze, AnalysisReport, Mode, ReduceReport};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galereg"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_twisted_cubic_from_both_presentations() {
    let a = run(&["analyze", "--A", "[[1,1,1,1],[0,1,2,3]]"]);
    let v = json(&a);
    assert_eq!(v["degree"], 3);
    assert_eq!(v["regularity"], 2);
    assert_eq!(v["verdict"]["maximal"], true);
    let b = run(&["analyze", "--basis", "[[1,-2,1,0],[0,1,-2,1]]"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_input_exits_2_without_output() {
    let out = run(&["analyze", r#"{"n": 4, "basis": [[1, -2"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");
    let out = run(&["analyze", "--basis", "[[1,1,1],[0,1,2]]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not orthogonal"));
}

#[test]
fn report_round_trips_through_a_file() {
    let first = run(&["analyze", "--gale", "[[1,1],[-1,1],[-1,0],[-1,-1],[2,-1]]"]);
    let report: AnalysisReport = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!((report.degree, report.regularity), (4, 3));
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(serde_json::to_string(&report.input).unwrap().as_bytes())
        .unwrap();
    let second = run(&["analyze", "--file", f.path().to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn fast_and_certify_agree_on_the_corpus() {
    let mut lattices: Vec<Lattice> = diagram_orbits(2, 3, 6)
        .iter()
        .filter_map(|g| Lattice::from_gale(g).ok())
        .filter(|l| l.is_nondegenerate())
        .collect();
    lattices.extend(ci_table().saturated.iter().cloned());
    lattices.extend((3..=8).map(|d| n4_family_lattice(d).unwrap()));
    lattices.extend(
        [(1, -2), (2, 3), (-1, 3)]
            .iter()
            .map(|&(b, c)| n5_family_lattice(b, c).unwrap()),
    );
    lattices.extend(
        [(1, 1), (2, -1), (3, 2)]
            .iter()
            .map(|&(b, c)| n6_family_lattice(b, c).unwrap()),
    );
    for l in &lattices {
        let fast = analyze(l, Mode::Fast, Field::Rational).unwrap();
        let cert = analyze(l, Mode::Certify, Field::Rational).unwrap();
        assert_eq!(
            (fast.degree, fast.regularity),
            (cert.degree, cert.regularity),
            "{l:?}"
        );
        assert_eq!(
            fast.verdict.map(|v| v.maximal),
            cert.verdict.map(|v| v.maximal),
            "{l:?}"
        );
        assert!(fast.betti.is_none() && cert.betti.is_some());
    }
}

#[test]
fn prime_field_and_field_validation() {
    let v = json(&run(&[
        "analyze",
        "--A",
        "[[1,1,1,1],[0,1,2,3]]",
        "--field",
        "prime:2",
    ]));
    assert_eq!(v["regularity"], 2);
    assert_eq!(
        run(&[
            "analyze",
            "--A",
            "[[1,1,1,1],[0,1,2,3]]",
            "--field",
            "prime:4"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn curves() {
    let v = json(&run(&["curve", "0,1,4,5", "--certify"]));
    assert_eq!(v["verdict"]["maximal"], true);
    assert_eq!(v["oracle"], serde_json::json!([5, 4]));
    let v = json(&run(&["curve", "0,1,2,5"]));
    assert_eq!(v["verdict"]["maximal"], false);
    let out = run(&["curve", "0,2,4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd 2"));
}

#[test]
fn reduce_walkthrough_example() {
    let out = run(&[
        "reduce",
        "--gale",
        "[[1,1],[-1,1],[-1,0],[-1,-1],[2,-1]]",
        "--partition",
        "[[0],[1,2],[3],[4]]",
    ]);
    let r: ReduceReport = serde_json::from_slice(&out.stdout).unwrap();
    let d = &r.data[0];
    assert_eq!(
        (d.chain.reg_l, d.chain.reg_q, d.chain.deg_q, d.chain.deg_l),
        (3, 3, 3, 4)
    );
    assert_eq!(d.degree_drop_one, Some(true));
    let all = run(&["reduce", "--gale", "[[1,1],[-1,1],[-1,0],[-1,-1],[2,-1]]"]);
    let r: ReduceReport = serde_json::from_slice(&all.stdout).unwrap();
    assert!(r.data.len() >= 1 && r.data.iter().all(|d| d.chain.holds));
}

#[test]
fn reduce_rejects_cm_input_and_bad_partitions() {
    let out = run(&["reduce", "--A", "[[1,1,1,1],[0,1,2,3]]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Cohen-Macaulay"));
    let out = run(&[
        "reduce",
        "--gale",
        "[[1,1],[-1,1],[-1,0],[-1,-1],[2,-1]]",
        "--partition",
        "[[1],[0,2],[3],[4]]",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vector 1"));
}

#[test]
fn searches_match_golden_files() {
    let v = json(&run(&["search", "table1", "--check"]));
    assert_eq!(v["report"]["total_count"], 23);
    assert_eq!(v["report"]["saturated_count"], 14);
    assert_eq!(v["golden"]["missing"], serde_json::json!([]));
    let v = json(&run(&["search", "cm-nonci", "--check"]));
    assert_eq!(v["report"]["total_count"], 4);
    let out = run(&[
        "search",
        "sweep",
        "--max-coord",
        "2",
        "--max-n",
        "6",
        "--pretty",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 mismatches"));
}

#[test]
fn golden_mismatch_exits_3_and_unknown_search_exits_2() {
    let out = run(&["search", "table1", "--check", "--max-n", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stdout.is_empty());
    assert_eq!(run(&["search", "bogus"]).status.code(), Some(2));
}

#[test]
fn non_saturated_lattices_have_no_verdict() {
    let v = json(&run(&["analyze", "--gale", "[[1,1],[1,-2],[-2,1]]"]));
    assert_eq!(v["saturated"], false);
    assert_eq!(v["verdict"], Value::Null);
    assert_eq!(
        (v["degree"].as_i64(), v["regularity"].as_i64()),
        (Some(3), Some(2))
    );
    let out = run(&["classify", "--gale", "[[1,1],[1,-2],[-2,1]]"]);
    assert_eq!(out.status.code(), Some(2));
}
