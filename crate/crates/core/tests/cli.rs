use std::path::PathBuf;
use std::process::{Command, Output};

use multiauto::spec_file::parse_system;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}.spec", env!("CARGO_MANIFEST_DIR"))
}

fn multiauto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiauto"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn state<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["automata"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|a| a["states"].as_array().unwrap())
        .find(|s| s["state"] == name)
        .unwrap_or_else(|| panic!("no state {name}"))
}

#[test]
fn simulate_exit_codes() {
    let o = multiauto(&["simulate", &fixture("walker"), "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("accepted 5\n"));

    let o = multiauto(&["simulate", &fixture("even"), "--n", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("rejected-loop"));

    let o = multiauto(&["simulate", &fixture("broken"), "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no transition"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_two() {
    let o = multiauto(&["simulate", "/nonexistent.spec", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).matches("/nonexistent.spec").count(), 1);

    let path = scratch("unknown-field.spec");
    let text = std::fs::read_to_string(fixture("walker"))
        .unwrap()
        .replacen('{', "{\"colour\": 1,", 1);
    std::fs::write(&path, text).unwrap();
    let o = multiauto(&["extract", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    assert_eq!(multiauto(&["simulate"]).status.code(), Some(2));
}

#[test]
fn analyze_reports() {
    let walker: Value = serde_json::from_str(&stdout(&multiauto(&["analyze", &fixture("walker")]))).unwrap();
    let w = state(&walker, "A1.w");
    assert_eq!(w["direction"], "Right");
    assert_eq!(w["amplitude"], 1);
    assert_eq!(w["takeoff_left"], "Traverse");

    let pingpong: Value = serde_json::from_str(&stdout(&multiauto(&["analyze", &fixture("pingpong")]))).unwrap();
    let r = state(&pingpong, "A1.r");
    assert_eq!(r["direction"], "Motionless");
    assert_eq!(r["amplitude"], 1);

    let drift: Value = serde_json::from_str(&stdout(&multiauto(&["analyze", &fixture("drift3")]))).unwrap();
    let a = state(&drift, "A1.a");
    assert_eq!(a["c"], 1);
    assert_eq!(a["amplitude"], 2);
    for key in ["k", "g", "n_min"] {
        assert!(drift["bounds"][key].is_u64(), "{key}");
    }
}

#[test]
fn extract_examples() {
    let cases = [
        ("even", "t=0 p=2 low= residues={0}"),
        ("walker", "t=0 p=1 low= residues={0}"),
        ("pingpong-noaccept", "t=0 p=1 low= residues={}"),
    ];
    for (name, want) in cases {
        let o = multiauto(&["extract", &fixture(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o), format!("{want}\n"), "{name}");
    }
}

#[test]
fn dumped_stages_precede_the_set() {
    let plain = stdout(&multiauto(&["extract", &fixture("even")]));
    let o = multiauto(&["extract", &fixture("even"), "--dump-formula", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.ends_with(&plain));
    let lines: Vec<&str> = out.lines().collect();
    let body = &lines[..lines.len() - 1];
    assert!(!body.is_empty());
    for pair in body.chunks(2) {
        assert!(pair[0].starts_with("; "), "{}", pair[0]);
        assert!(pair[1].starts_with("(lambda "), "{}", pair[1]);
    }
    for stage in ["frontier", "accept", "condition"] {
        assert!(body.iter().any(|l| l.starts_with(&format!("; {stage} "))), "{stage}");
    }
}

#[test]
fn verify_examples() {
    for name in ["even", "walker"] {
        let o = multiauto(&["verify", &fixture(name), "--n-max", "300"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o), "OK 301\n");
    }
    let o = multiauto(&["verify", &fixture("even"), "--n-max", "300", "--corrupt", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("MISMATCH N=5"), "{}", stdout(&o));
}

#[test]
fn qe_budget_exits_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_multiauto"))
        .args(["extract", &fixture("even")])
        .env("MULTIAUTO_QE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: stage `"), "{}", stderr(&o));
}

#[test]
fn fuzz_examples() {
    let o = multiauto(&["fuzz", "--count", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "100/100 OK\n");

    let once = stdout(&multiauto(&["fuzz", "--count", "1", "--seed", "7", "--print-specs"]));
    let twice = stdout(&multiauto(&["fuzz", "--count", "1", "--seed", "7", "--print-specs"]));
    assert!(once.starts_with("# system 0\n"));
    assert_eq!(once, twice);
}

#[test]
fn fuzz_respects_size_limits() {
    let o = multiauto(&[
        "fuzz",
        "--count",
        "30",
        "--seed",
        "3",
        "--max-states",
        "2",
        "--max-automata",
        "2",
        "--print-specs",
    ]);
    let out = stdout(&o);
    let specs: Vec<&str> = out.split("# system ").skip(1).collect();
    assert_eq!(specs.len(), 30);
    for chunk in specs {
        let json = &chunk[chunk.find('\n').unwrap() + 1..];
        let doc: Value = serde_json::Deserializer::from_str(json)
            .into_iter()
            .next()
            .unwrap()
            .unwrap();
        let sys = parse_system(&doc.to_string()).unwrap();
        assert!(sys.len() <= 2);
        assert!(sys.automata().iter().all(|a| a.len() <= 2));
    }
}

#[test]
fn diagram_files_are_repeatable() {
    let (a, b) = (scratch("walker-a.svg"), scratch("walker-b.svg"));
    for path in [&a, &b] {
        let o = multiauto(&["diagram", &fixture("walker"), "--n", "5", "-o", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    assert_eq!(
        stdout(&multiauto(&["diagram", &fixture("walker"), "--n", "5"])).into_bytes(),
        svg
    );
    let text = String::from_utf8(svg).unwrap();
    assert!(text.starts_with("<svg "));
    assert_eq!(text.matches("class=\"head\"").count(), 1);
}
