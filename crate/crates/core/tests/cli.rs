use std::process::Command;

use num_bigint::BigInt;
use serde_json::{json, Value};

use sipkit::cli::{execute, RunReport};
use sipkit::ipsets::{self, IntSet};
use sipkit::rotation::{self, Angle, ArcSet, RotationConfig};
use sipkit::Verdict;

fn run(argv: &[&str]) -> RunReport {
    let exec = execute(argv.iter().copied());
    exec.report.unwrap_or_else(|| panic!("no report for {argv:?}: {}", exec.output))
}

fn strings(v: &Value) -> Vec<i64> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_str().expect("decimal string").parse().unwrap())
        .collect()
}

const COMMANDS: &[&[&str]] = &[
    &["expand", "5", "--base", "3"],
    &["zcount", "123456789"],
    &["color", "7", "--K", "3"],
    &["sip", "1,3,9"],
    &["search", "mono-d", "--coloring", "mod:2", "--n", "20", "--m", "3"],
    &["search", "mono-ip", "--coloring", "z:3", "--n", "40", "--m", "2"],
    &["search", "tsip", "--target", "mult:3:200", "--m", "2", "--window", "50"],
    &["family", "prop51", "--universe", "3", "--gens", "1,2;2,3"],
    &["family", "gamma", "--universe", "4", "--gens", "1", "--shift", "2", "--cyclic"],
    &["refine", "--k0", "pow3", "--level", "2", "--request", "3"],
    &["witness", "--u", "7", "--k0", "spaced:3:pos", "--depth", "3"],
    &["thm46", "--K", "3", "--t0", "1", "--blocks", "pow3", "--count", "7"],
    &["rotate", "hitting", "--arc=-1/8,1/8", "--horizon", "13"],
    &["rotate", "recur", "--arc=-1/8,1/8", "--depth", "3", "--horizon", "5000"],
    &["rotate", "chain", "--seed-set", "34", "--horizon", "3000"],
];

#[test]
fn expand_example() {
    let r = run(&["expand", "5", "--base", "3"]);
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.witnesses["digits"], json!([-1, -1, 1]));
    assert_eq!(r.witnesses["z"], json!(1));
    assert_eq!(r.witnesses["type"], json!("Negative"));
}

#[test]
fn hitting_example() {
    let r = run(&["rotate", "hitting", "--arc=-1/8,1/8", "--horizon", "13"]);
    assert_eq!(strings(&r.witnesses["hits"]), vec![5, 8, 13]);
}

#[test]
fn residue_cycle_example() {
    let r = run(&["thm46", "--K", "3", "--t0", "1", "--blocks", "pow3", "--count", "7"]);
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.witnesses["cycle"]["residues"], json!([0, 2, 1]));
    assert_eq!(strings(&r.witnesses["cycle"]["sums"]), vec![3280, 3262, 3100]);
}

fn without_timing(mut r: RunReport) -> RunReport {
    r.elapsed_ms = 0;
    r
}

#[test]
fn reports_rerun_from_their_own_argv() {
    for argv in COMMANDS {
        let exec = execute(argv.iter().copied());
        let parsed: RunReport = serde_json::from_str(&exec.output).expect("report is JSON");
        let again = run(&parsed.argv().iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(without_timing(parsed), without_timing(again), "{argv:?}");
    }
}

#[test]
fn csv_and_json_carry_the_same_content() {
    for argv in COMMANDS {
        let json_report: RunReport = serde_json::from_str(&execute(argv.iter().copied()).output).unwrap();
        let csv_argv: Vec<&str> = ["--format", "csv"].iter().chain(argv.iter()).copied().collect();
        let text = execute(csv_argv.iter().copied()).output;
        assert!(text.starts_with("path,value"), "{argv:?}");
        let csv_report = RunReport::from_csv(&text).unwrap();
        assert_eq!(csv_report.command, json_report.command);
        assert_eq!(csv_report.verdict, json_report.verdict);
        assert_eq!(csv_report.witnesses, json_report.witnesses, "{argv:?}");
        assert_eq!(csv_report.counts, json_report.counts, "{argv:?}");
        for key in ["alpha", "seed", "budget", "cap", "horizon", "command"] {
            assert_eq!(csv_report.params.get(key), json_report.params.get(key), "{argv:?} {key}");
        }
        assert_eq!(csv_report.params["format"], json!("csv"));
    }
}

#[test]
fn embedded_witnesses_revalidate() {
    let r = run(&["search", "mono-d", "--coloring", "mod:2", "--n", "20", "--m", "3"]);
    let l: IntSet = strings(&r.witnesses["found"]).into_iter().map(BigInt::from).collect();
    let d = ipsets::positive_part(&ipsets::difference_set(&l).unwrap());
    let parity: Vec<i64> = d.to_i64s().unwrap().iter().map(|x| x % 2).collect();
    assert!(parity.windows(2).all(|w| w[0] == w[1]));

    let r = run(&["search", "tsip", "--target", "mult:3:200", "--m", "2", "--window", "50"]);
    let gens: IntSet = strings(&r.witnesses["found"]["generators"]).into_iter().map(BigInt::from).collect();
    let t0: BigInt = r.witnesses["found"]["t0"].as_str().unwrap().parse().unwrap();
    let members = ipsets::positive_part(&ipsets::sip_closure(&gens).unwrap().translate(&t0));
    assert!(members.iter().all(|x| x <= &BigInt::from(200) && (x % 3u32) == BigInt::from(0)));

    let r = run(&["rotate", "recur", "--arc=-1/8,1/8", "--depth", "3", "--horizon", "5000"]);
    let gens: IntSet = strings(&r.witnesses["generators"]).into_iter().map(BigInt::from).collect();
    let arc: ArcSet = "-1/8,1/8".parse().unwrap();
    let cfg = RotationConfig::default().with_horizon(5000);
    let hits = rotation::hitting_set(&Angle::zero(), &arc, &cfg);
    let sip = ipsets::positive_part(&ipsets::sip_closure(&gens).unwrap());
    assert!(sip.is_subset(&hits));
}

#[test]
fn exit_codes() {
    assert_eq!(execute(["expand", "5"]).exit_code, 0);
    assert_eq!(execute(["search", "mono-ip", "--coloring", "mod:2", "--n", "5", "--m", "2"]).exit_code, 1);
    let exhausted = execute(["--budget", "3", "search", "mono-d", "--coloring", "mod:2", "--n", "20", "--m", "3"]);
    assert_eq!(exhausted.exit_code, 2);
    assert_eq!(exhausted.report.unwrap().verdict, Verdict::Inconclusive);
    assert_eq!(execute(["rotate", "prop31", "--horizon", "200"]).exit_code, 2);
    assert_eq!(execute(["bogus"]).exit_code, 64);
    assert_eq!(execute(["expand", "--base", "4", "5"]).exit_code, 64);
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_sipkit"))
        .args(["rotate", "hitting", "--arc=[0,1/8)", "--horizon", "13"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(strings(&report.witnesses["hits"]), vec![5, 13]);

    let out = Command::new(env!("CARGO_BIN_EXE_sipkit")).arg("--nope").output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}
