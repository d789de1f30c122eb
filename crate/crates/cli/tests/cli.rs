use std::fs;
use std::process::{Command, Output};
use std::sync::Arc;

use cig_cli::run::{audit_poly, error_report, run_verify};
use cig_cli::{CacheOutcome, GraphCache};
use cig_core::verify::CheckOptions;
use cig_core::{build_graph, FieldSpec, LemmaId, LemmaReport, Poly, Status};

fn cig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cig"))
        .args(args)
        .env_remove("CIG_CACHE_DIR")
        .output()
        .expect("cig runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reports(o: &Output) -> Vec<LemmaReport> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn gf(q: u64) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::from_order(q).unwrap())
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = GraphCache::new(dir.path());
    let fresh = build_graph(gf(9)).unwrap();
    let (g, outcome) = cache.load_or_build(gf(9)).unwrap();
    assert_eq!(outcome, CacheOutcome::Miss);
    let (h, outcome) = cache.load_or_build(gf(9)).unwrap();
    assert_eq!(outcome, CacheOutcome::Hit);
    assert_eq!(g.graph(), fresh.graph());
    assert_eq!(h.graph(), fresh.graph());
    assert_eq!(h.vertex(5), fresh.vertex(5));

    // flip one edge endpoint: the checksum no longer matches
    let path = cache.path_for(g.field());
    let text = fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"edges\":[[0,", "\"edges\":[[1,", 1);
    assert_ne!(text, tampered);
    fs::write(&path, tampered).unwrap();
    let (r, outcome) = cache.load_or_build(gf(9)).unwrap();
    assert_eq!(outcome, CacheOutcome::Rebuilt);
    assert_eq!(r.graph(), fresh.graph());
    assert_eq!(cache.load_or_build(gf(9)).unwrap().1, CacheOutcome::Hit);

    fs::write(&path, b"{not json").unwrap();
    assert_eq!(cache.load_or_build(gf(9)).unwrap().1, CacheOutcome::Rebuilt);

    let stale = fs::read_to_string(&path).unwrap().replacen("\"version\":\"", "\"version\":\"0.0.0-", 1);
    fs::write(&path, stale).unwrap();
    assert_eq!(cache.load_or_build(gf(9)).unwrap().1, CacheOutcome::Rebuilt);
}

#[test]
fn cache_keys_differ_by_field() {
    let dir = tempfile::tempdir().unwrap();
    let cache = GraphCache::new(dir.path());
    let (a, b) = (FieldSpec::from_order(9).unwrap(), FieldSpec::from_order(27).unwrap());
    assert_ne!(cache.path_for(&a), cache.path_for(&b));
    assert_eq!(cache.path_for(&a), cache.path_for(&FieldSpec::new(3, 2).unwrap()));
}

#[test]
fn dimacs_headers_and_determinism() {
    let o = cig(&["export", "--q", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("p edge 21 42"));
    assert_eq!(text.lines().count(), 43);
    assert!(text.lines().skip(1).all(|l| {
        let parts: Vec<u32> = l.strip_prefix("e ").unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
        parts.len() == 2 && 1 <= parts[0] && parts[0] < parts[1] && parts[1] <= 21
    }));
    let o13 = cig(&["export", "--q", "13"]);
    assert_eq!(stdout(&o13).lines().next(), Some("p edge 91 273"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.dimacs");
    let cache = dir.path().join("cache");
    let args = ["export", "--q", "7", "--cache-dir", cache.to_str().unwrap(), "--out", file.to_str().unwrap()];
    assert!(cig(&args).status.success());
    let first = fs::read(&file).unwrap();
    assert!(cig(&args).status.success());
    assert_eq!(fs::read(&file).unwrap(), first);
    assert_eq!(first, o.stdout);
}

#[test]
fn invalid_q_is_rejected() {
    for args in [
        &["verify", "--q", "6"][..],
        &["verify", "--q", "3"],
        &["verify", "--q-range", "9..7"],
        &["export", "--q", "6"],
        &["weil", "--q", "8"],
    ] {
        let o = cig(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn verify_all_at_q7() {
    let o = cig(&["verify", "--q", "7", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = reports(&o);
    let lemmas: Vec<LemmaId> = rs.iter().map(|r| r.lemma).collect();
    for l in [LemmaId::Disks, LemmaId::FourCycle, LemmaId::Eigen, LemmaId::Theorem1] {
        assert!(lemmas.contains(&l), "{l} missing");
    }
    assert!(!lemmas.contains(&LemmaId::Poly1));
    assert!(rs.iter().all(|r| r.q == 7 && !r.is_failure()));
    let t1 = rs.iter().find(|r| r.lemma == LemmaId::Theorem1).unwrap();
    assert_eq!(t1.status, Status::Verified);
    assert_eq!(t1.measurement("aut_order").unwrap(), "336");
}

#[test]
fn range_sweep_is_in_q_order_and_parallel_safe() {
    let run = |jobs: &str| {
        let o = cig(&["verify", "--q-range", "4..13", "--lemma", "theorem1,4cycle", "--jobs", jobs]);
        assert!(o.status.success());
        reports(&o)
    };
    let (a, b) = (run("1"), run("4"));
    let key = |rs: &[LemmaReport]| rs.iter().map(|r| (r.q, r.lemma, r.status, r.measurements.clone())).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
    let qs: Vec<u32> = a.iter().map(|r| r.q).collect();
    assert_eq!(qs, vec![4, 5, 5, 7, 7, 8, 9, 9, 11, 11, 13, 13]);
    // q = 5 lies below the stated range and is reported, not failed
    let q5 = a.iter().find(|r| r.q == 5 && r.lemma == LemmaId::Theorem1).unwrap();
    assert_eq!(q5.status, Status::OutOfStatedRange);
    assert_eq!(q5.measurement("aut_order").unwrap(), "933120");
}

#[test]
fn formats_render_the_same_records() {
    let base = ["verify", "--q", "9", "--lemma", "eigen,4cycle"];
    let json = cig(&[&base[..], &["--format", "json"]].concat());
    let csv = cig(&[&base[..], &["--format", "csv"]].concat());
    let human = cig(&[&base[..], &["--format", "human"]].concat());
    assert_eq!(reports(&json).len(), 2);
    let csv_text = stdout(&csv);
    assert!(csv_text.starts_with("lemma,q,status,millis,seed,witnesses,measurements"));
    assert_eq!(csv_text.lines().count(), 3);
    let human_text = stdout(&human);
    assert!(human_text.contains("4cycle") && human_text.contains("eigen") && human_text.contains("verified"));
}

#[test]
fn weil_command() {
    let o = cig(&["weil", "--q", "73", "--samples", "20", "--seed", "1"]);
    assert!(o.status.success());
    let r = &reports(&o)[0];
    assert_eq!((r.status, r.seed), (Status::Verified, Some(1)));
    assert_eq!(r.measurement("samples").unwrap(), 20);
    let o = cig(&["weil", "--q", "67", "--family", "bound2", "--samples", "20", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(reports(&o)[0].status, Status::Verified);
    assert_eq!(cig(&["weil", "--q", "73", "--family", "bound2"]).status.code(), Some(2));
    let again = cig(&["weil", "--q", "67", "--family", "bound2", "--samples", "20", "--seed", "1"]);
    assert_eq!(reports(&again)[0].measurements, reports(&o)[0].measurements);
}

#[test]
fn perfect_square_is_refused_with_nonzero_exit() {
    let o = cig(&["weil", "--q", "13", "--poly", "1,0,2,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["outcome"], "hypothesis-violation");
    let o = cig(&["weil", "--q", "13", "--poly", "1,0,1,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cig(&["weil", "--q", "13", "--poly", "1,x"]).status.code(), Some(2));
    assert_eq!(cig(&["weil", "--q", "13", "--poly", "13"]).status.code(), Some(2));
}

#[test]
fn library_entry_points() {
    let k = FieldSpec::from_order(13).unwrap();
    let rec = audit_poly(&k, &Poly::from_ints(&k, &[1, 0, 1, 5]));
    assert_eq!(rec.outcome, "holds");
    assert_eq!(rec.n, Some(cig_core::weil::count_solutions_brute_force(&k, &Poly::from_ints(&k, &[1, 0, 1, 5]))));
    let err = error_report(LemmaId::Disks, 7, &"boom");
    assert!(err.is_failure());
    let rs = run_verify(&[5, 8], &[LemmaId::Theorem1, LemmaId::Disks], &CheckOptions::default(), None, 2).unwrap();
    assert_eq!(rs.iter().map(|r| (r.q, r.lemma)).collect::<Vec<_>>(), vec![(5, LemmaId::Theorem1), (5, LemmaId::Disks), (8, LemmaId::Theorem1)]);
    // disks does not apply at even q
    assert!(rs.iter().all(|r| !r.is_failure()));
}
