//! End-to-end tests of the CLI binary: golden-file table output, payload
//! determinism, error-kind exit codes, and per-command content checks.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_henon-padic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_of(out)).expect("json output")
}

/// Strip the wall-clock line so reports can be compared byte-for-byte.
fn strip_duration(s: &str) -> String {
    s.lines()
        .filter(|l| !l.trim_start().starts_with("\"duration_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

const TABLE1_ARGS: &[&str] = &[
    "table",
    "--row", "3,2,3,6",
    "--row", "3,8,3,6",
    "--row", "3,2,9,6",
    "--row", "5,4,5,5",
    "--row", "5,1,5,5",
    "--row", "7,1,7,4",
    "--row", "7,2,7,4",
    "--format", "csv",
];

#[test]
fn table_csv_matches_golden_file() {
    let out = run(TABLE1_ARGS);
    assert!(out.status.success());
    let golden = include_str!("golden/table1.csv");
    assert_eq!(stdout_of(&out), golden, "table CSV must be byte-identical to the golden file");
}

#[test]
fn table_csv_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let mut args: Vec<&str> = TABLE1_ARGS.to_vec();
    let path_str = path.to_str().unwrap().to_string();
    args.push("--out");
    args.push(&path_str);
    let out = run(&args);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, include_str!("golden/table1.csv"));
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["--p", "3", "--a", "2", "--b", "3", "classify"];
    let first = strip_duration(&stdout_of(&run(&args)));
    let second = strip_duration(&stdout_of(&run(&args)));
    assert_eq!(first, second, "identical configs must give identical payloads");

    let args = [
        "--p", "3", "--a", "1/9", "--b", "1", "--precision", "16",
        "horseshoe", "periodic", "--l", "4",
    ];
    let first = strip_duration(&stdout_of(&run(&args)));
    let second = strip_duration(&stdout_of(&run(&args)));
    assert_eq!(first, second);
}

#[test]
fn classify_reports_regions_and_involution() {
    let out = run(&["--p", "3", "--a", "2", "--b", "3", "classify"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["region"], "II+");
    assert_eq!(v["result"]["involution"]["a"], "2/9");
    assert_eq!(v["result"]["involution"]["b"], "1/3");
    assert_eq!(v["result"]["involution"]["region"], "II-");

    let out = run(&["--p", "3", "--a", "1/9", "--b", "1", "classify"]);
    let v = json_of(&out);
    assert_eq!(v["result"]["region"], "III");
    assert_eq!(v["result"]["a_is_square"], true);

    let out = run(&["--p", "3", "--a", "1", "--b", "1", "classify"]);
    let v = json_of(&out);
    assert_eq!(v["result"]["region"], "I");
    assert_eq!(v["result"]["good_reduction_mod_p"], true);
}

#[test]
fn fixed_lists_the_roots_of_8_3() {
    let out = run(&["--p", "3", "--a", "8", "--b", "3", "fixed"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let fps = v["result"]["fixed_points"].as_array().unwrap();
    assert_eq!(fps.len(), 2);
    // x-coordinates 4 and -2; digit expansions start 1*3^0 + 1*3^1 (= 4)
    // and 1*3^0 + 2*3^1 (= 7 = -2 mod 9)
    let digits: Vec<String> = fps
        .iter()
        .map(|fp| fp["x"]["digits"].as_str().unwrap().to_string())
        .collect();
    assert!(digits.iter().any(|d| d.starts_with("1*3^0 + 1*3^1")), "{digits:?}");
    assert!(digits.iter().any(|d| d.starts_with("1*3^0 + 2*3^1")), "{digits:?}");
    assert!(v["result"]["two_cycle"].is_null());
}

#[test]
fn measure_equidistributes_on_the_attractor() {
    let out = run(&[
        "--p", "3", "--a", "2", "--b", "3", "measure",
        "--start", "0,0", "--k", "2", "--n", "3000",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["periodic_ball_count"], 3);
    let weights = v["result"]["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 3);
    for w in weights {
        let weight = w[2].as_f64().unwrap();
        assert!((weight - 1.0 / 3.0).abs() < 0.02);
    }
    let tv = v["result"]["tv_to_uniform"].as_f64().unwrap();
    assert!(tv <= 0.02);
}

#[test]
fn horseshoe_periodic_lists_all_words() {
    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "--precision", "16",
        "horseshoe", "periodic", "--l", "3",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["count"], 8);
    let points = v["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    let words: Vec<&str> = points.iter().map(|p| p["word"].as_str().unwrap()).collect();
    assert!(words.contains(&"+++"));
    assert!(words.contains(&"---"));
    assert!(words.contains(&"+-+"));
}

#[test]
fn fate_certifies_escape_and_boundedness() {
    let out = run(&[
        "--p", "3", "--a", "2", "--b", "3", "fate", "--start", "0,0",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["fate"]["BoundedForward"]["step"], 0);

    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "fate", "--start", "9,9",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["fate"]["EscapesForward"]["step"], 1);
}

#[test]
fn julia_membership_round_trip() {
    let out = run(&[
        "--p", "3", "--a", "8", "--b", "3", "julia", "--start", "4,4", "--kmax", "5",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["membership"]["MemberUpTo"], 5);

    let out = run(&[
        "--p", "3", "--a", "2", "--b", "3", "julia", "--start", "0,0", "--kmax", "5",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["membership"]["NonMemberWitness"], 1);
}

#[test]
fn orbit_trace_records_steps() {
    let out = run(&[
        "--p", "3", "--a", "8", "--b", "3", "orbit", "--start", "4,4", "--n", "5",
    ]);
    let v = json_of(&out);
    let points = v["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 6);
    assert!(v["result"]["certificate"].is_null());
}

#[test]
fn cycles_with_kmax_reports_profile_and_tree() {
    let out = run(&[
        "--p", "3", "--a", "2", "--b", "3", "cycles", "--kmax", "4",
    ]);
    let v = json_of(&out);
    let reports = v["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert_eq!(reports[3]["max_period"], 27);
    assert_eq!(v["result"]["attractor_profile"]["verdict"], "InfiniteCandidate");
    let tree = v["result"]["tree"].as_array().unwrap();
    assert_eq!(tree[0]["periodic_balls"], 1);
}

#[test]
fn error_exit_codes_are_stable() {
    // parse error: 2
    let out = run(&["--p", "3", "--a", "xyz", "--b", "3", "classify"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["error"]["kind"], "Parse");

    // wrong region for a horseshoe: 3
    let out = run(&[
        "--p", "3", "--a", "2", "--b", "1", "horseshoe", "periodic", "--l", "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&out);
    assert_eq!(v["error"]["kind"], "WrongRegion");

    // region III with a non-square a: 4
    let out = run(&[
        "--p", "3", "--a", "1/3", "--b", "1", "horseshoe", "periodic", "--l", "2",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // wrong region for ball dynamics: 3
    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "cycles", "--k", "2",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // non-integral start point for measure: 9
    let out = run(&[
        "--p", "3", "--a", "2", "--b", "3", "measure",
        "--start", "1/3,0", "--k", "1", "--n", "10",
    ]);
    assert_eq!(out.status.code(), Some(9));

    // coding a point that escapes the box: 10
    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "horseshoe", "code", "--start", "0,0",
    ]);
    assert_eq!(out.status.code(), Some(10));
}

#[test]
fn budget_rows_are_marked_without_failing() {
    let out = run(&[
        "table", "--row", "3,2,3,3", "--budget", "100", "--format", "csv",
    ]);
    assert!(out.status.success(), "budget rows must not fail the command");
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,a,b,k,P_k,cycles");
    assert_eq!(lines[1], "3,2,3,1,1,1:1");
    assert_eq!(lines[2], "3,2,3,2,3,3:1");
    assert_eq!(lines[3], "3,2,3,3,budget,budget");
}

#[test]
fn empty_table_emits_header_only() {
    let out = run(&["table", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "p,a,b,k,P_k,cycles\n");
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["table", "--row", "3,8,3,5", "--row", "5,1,5,4", "--format", "csv"];
    let serial = stdout_of(&run(&base));
    let mut threaded: Vec<&str> = base.to_vec();
    threaded.extend_from_slice(&["--threads", "4"]);
    assert_eq!(serial, stdout_of(&run(&threaded)));
}

#[test]
fn horseshoe_point_and_verify() {
    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "--precision", "16",
        "horseshoe", "point", "--word", "+-",
    ]);
    let v = json_of(&out);
    // the 2-cycle phase point (1/3, -1/3)
    assert!(v["result"]["point"]["x"]["digits"]
        .as_str()
        .unwrap()
        .starts_with("1*3^-1"));

    // a finite window
    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "--precision", "16",
        "horseshoe", "point", "--word", "-+.++",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["word"], "-+.++");

    let out = run(&[
        "--p", "3", "--a", "1/9", "--b", "1", "--precision", "16",
        "horseshoe", "verify", "--word", "++-",
    ]);
    let v = json_of(&out);
    assert_eq!(v["result"]["within_bound"], true);
}

#[test]
fn digit_literals_are_accepted() {
    // 2+0*3+1*3^2 = 11
    let out = run(&["--p", "3", "--a", "2+0*3+1*3^2", "--b", "3", "classify"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["config"]["a"], "2+0*3+1*3^2");
    assert_eq!(v["result"]["region"], "II+");
}
