use std::path::PathBuf;
use std::process::Command;

use pseudostop_cli::{run_from, Instance, EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.display().to_string()
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_pseudostop"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("exit code"),
        String::from_utf8(output.stdout).unwrap(),
        String::from_utf8(output.stderr).unwrap(),
    )
}

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pseudostop").chain(args.iter().copied());
    let code = run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn lines(stdout: &str) -> Vec<Value> {
    stdout.lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn holds(record: &Value, label: &str) -> bool {
    record["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == label)
        .unwrap_or_else(|| panic!("no condition {label} in {record}"))["holds"]
        .as_bool()
        .unwrap()
}

#[test]
fn check_fix_a_with_fix_c_exits_zero() {
    let (code, stdout, _) = binary(&["check", &data("fix_a_tau_c.json")]);
    assert_eq!(code, 0);
    let records = lines(&stdout);
    let footer = &records.last().unwrap()["footer"];
    assert_eq!(footer["failures"], 0);
    assert_eq!(footer["counterexamples"], 0);
    let names: Vec<_> = records.iter().filter_map(|r| r["check"].as_str()).collect();
    for check in ["pseudoH", "ny2", "hloc", "honest-pseudo", "barrier", "gstoping-d"] {
        assert!(names.contains(&check), "{check} missing from {names:?}");
    }
    let pseudo_h = records.iter().find(|r| r["check"] == "pseudoH").unwrap();
    assert_eq!(pseudo_h["notes"]["stopping_times"], "82");
    assert!(records.iter().all(|r| r.get("timing").is_none()));
}

#[test]
fn check_fix_b_with_nu_exits_one_with_witness() {
    let (code, stdout, _) = binary(&["check", &data("fix_b_nu.json")]);
    assert_eq!(code, 1);
    let records = lines(&stdout);
    let ny2 = records.iter().find(|r| r["check"] == "ny2").unwrap();
    assert_eq!(ny2["time"], "nu");
    assert_eq!(ny2["counterexample"], true);
    assert!(!holds(ny2, "(i) pseudo-stopping"));
    let witness = &ny2["witness"];
    assert!(witness["condition"].is_string(), "{ny2}");
    let pseudo_h = records.iter().find(|r| r["check"] == "pseudoH").unwrap();
    assert!(!holds(pseudo_h, "(i) F immersed in G"));
    assert!(pseudo_h["witness"].is_object());
}

#[test]
fn probabilities_summing_to_two_exit_two() {
    let (code, stdout, stderr) = binary(&["check", &data("probs_sum_two.json")]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("probs") && stderr.contains("sum to 2"), "{stderr}");
}

#[test]
fn malformed_files_report_locations() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\"omega\": 2,\n \"probs\": [\"1/2\", 5]}", "line 2"),
        (
            r#"{"omega":2,"probs":["1/2","1/2"],"horizon":1,"filtrations":{"F":[[[0,1]],[[0],[1]]]},"times":{"tau":[0,7]}}"#,
            "times.tau[1]",
        ),
        (
            r#"{"omega":2,"probs":["1/2","1/2"],"horizon":1,"filtrations":{"F":[[[0],[1]],[[0,1]]]}}"#,
            "filtrations.F",
        ),
        (
            r#"{"omega":2,"probs":["1/2","1/2"],"horizon":1,"filtrations":{"F":[[[0,1]],[[0],[1]]]},"processes":{"X":[["0","0"],["1","x"]]}}"#,
            "processes.X[1][1]",
        ),
    ];
    for (i, (text, location)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("case{i}.json"));
        std::fs::write(&path, text).unwrap();
        let (code, _, stderr) = run(&["check", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT, "{text}");
        assert!(stderr.contains(location), "{stderr} lacks {location}");
    }
}

#[test]
fn explicit_check_with_unmet_precondition_is_input_error() {
    let (code, _, stderr) = run(&["check", &data("fix_d_honest.json"), "--checks", "pseudoH"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(stderr.contains("needs filtrations F and G"), "{stderr}");
    let (code, _, stderr) = run(&["check", &data("fix_b_nu.json"), "--checks", "gstoping-d"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(stderr.contains("immersed"), "{stderr}");
}

#[test]
fn selected_checks_only() {
    let (code, stdout, _) = run(&["check", &data("fix_a_tau_c.json"), "--checks", "ny2,barrier"]);
    assert_eq!(code, EXIT_OK);
    let records = lines(&stdout);
    let names: Vec<_> = records.iter().filter_map(|r| r["check"].as_str()).collect();
    assert_eq!(names, ["ny2", "barrier", "barrier"]);
}

#[test]
fn fix_d_file_is_honest_not_pseudo_and_refutes_hloc_on_its_process() {
    let (code, stdout, _) = run(&["check", &data("fix_d_honest.json")]);
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    let records = lines(&stdout);
    let honest = records.iter().find(|r| r["check"] == "honest-pseudo").unwrap();
    assert_eq!(honest["agree"], true);
    let facts = honest["facts"].as_array().unwrap();
    let fact = |l: &str| facts.iter().find(|f| f["label"] == l).unwrap()["holds"].as_bool().unwrap();
    assert!(fact("honest") && !fact("pseudo-stopping"));
    let process = records.iter().find(|r| r["process"] == "V").unwrap();
    assert_eq!(process["check"], "hloc");
    assert_eq!(process["agree"], true);
}

#[test]
fn instance_files_round_trip() {
    for name in ["fix_a_tau_c.json", "fix_b_nu.json", "fix_d_honest.json"] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let inst = Instance::parse(&text).unwrap();
        let again = Instance::parse(&inst.to_json()).unwrap();
        assert_eq!(inst, again, "{name}");
        let raw: Value = serde_json::from_str(&text).unwrap();
        let written: Value = serde_json::from_str(&inst.to_json()).unwrap();
        assert_eq!(raw, written, "{name}");
    }
}

#[test]
fn fuzz_is_deterministic() {
    let args = ["fuzz", "--trials", "40", "--seed", "17", "--omega-max", "6", "--horizon-max", "3"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    let records = lines(&a);
    let footer = &records.last().unwrap()["footer"];
    assert_eq!(footer["trials"], 40);
    let disagreeing = records.iter().filter(|r| r["agree"] == false).count() as u64;
    assert_eq!(footer["failures"].as_u64().unwrap(), disagreeing);
    assert_eq!(c1, if disagreeing == 0 { EXIT_OK } else { EXIT_COUNTEREXAMPLE });
}

#[test]
fn fuzz_product_immersed_is_always_immersed() {
    let (code, stdout, _) = run(&["fuzz", "--trials", "100", "--seed", "5", "--mode", "product_immersed"]);
    let records = lines(&stdout);
    let immersion: Vec<_> = records.iter().filter(|r| r["check"] == "immersion-oracles").collect();
    assert_eq!(immersion.len(), 100);
    assert!(immersion.iter().all(|r| holds(r, "F-martingales are G-martingales")));
    assert!(records.iter().filter(|r| r.get("check").is_some()).all(|r| r["mode"] == "product_immersed"));
    assert_eq!(records.last().unwrap()["footer"]["summary"]["flags"]["immersed"], 100);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn fuzz_failures_only_and_timing() {
    let base = ["fuzz", "--trials", "12", "--seed", "1", "--omega-max", "5", "--horizon-max", "3"];
    let (_, full, _) = run(&base);
    let mut args = base.to_vec();
    args.push("--failures-only");
    let (_, filtered, _) = run(&args);
    let full = lines(&full);
    let filtered = lines(&filtered);
    let (a, b) = (&full.last().unwrap()["footer"], &filtered.last().unwrap()["footer"]);
    assert_eq!((&a["failures"], &a["summary"]), (&b["failures"], &b["summary"]));
    assert_eq!(b["parameters"]["failures_only"], true);
    assert_eq!(
        filtered.len() - 1,
        full.iter().filter(|r| r["agree"] == false).count()
    );
    args.push("--timing");
    let (_, timed, _) = run(&args);
    assert!(lines(&timed).iter().filter(|r| r.get("check").is_some()).all(|r| r["timing"]["instance_ms"].is_number()));
}

#[test]
fn fuzz_rejects_invalid_parameters() {
    assert_eq!(run(&["fuzz", "--trials", "3", "--omega-max", "1"]).0, EXIT_INPUT);
    assert_eq!(run(&["fuzz", "--trials", "3", "--mode", "sideways"]).0, EXIT_INPUT);
    assert_eq!(run(&["fuzz", "--trials", "3", "--cap", "0"]).0, EXIT_INPUT);
}

#[test]
fn mc_reports_and_exit_codes() {
    let (code, stdout, _) = run(&["mc", "cox", "--paths", "5000", "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    let records = lines(&stdout);
    assert_eq!(records.len(), 3);
    let raw = stdout.lines().next().unwrap();
    assert!(raw.contains("\"estimate\":4.") || raw.contains("\"estimate\":5."), "{raw}");

    let (a, out_a, _) = run(&["mc", "williams", "--paths", "10", "--dt", "0.1"]);
    let (b, out_b, _) = run(&["mc", "williams", "--paths", "10", "--dt", "0.1"]);
    assert_eq!((a, &out_a), (b, &out_b));
    assert!(lines(&out_a).iter().filter(|r| r.get("mc").is_some()).all(|r| r["wide_tolerance"] == true));

    assert_eq!(run(&["mc", "poisson", "--lambda", "-1", "--paths", "10"]).0, EXIT_INPUT);
    assert_eq!(run(&["mc", "cox", "--paths", "3"]).0, EXIT_INPUT);
    assert_eq!(binary(&["mc", "williams", "--paths", "0", "--dt", "0.1"]).0, 2);
}
