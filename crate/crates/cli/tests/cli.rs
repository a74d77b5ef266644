use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parkscope"))
        .args(args)
        .env_remove("PARKSCOPE_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn single_hurwitz_prints_a_rational() {
    let o = run(&["single-hurwitz", "0", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1");
    assert_eq!(stdout(&run(&["single-hurwitz", "0", "1,1"])), "1/2");
}

#[test]
fn info_reports_example1() {
    let o = run(&["info", &fixture("example1_park.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("d=4 g=1 n=8"), "{}", stdout(&o));
    let o = run(&["info", &fixture("example1_monodromy.json")]);
    assert!(stdout(&o).starts_with("d=4 g=1 n=8"), "{}", stdout(&o));
}

#[test]
fn isomorphic_to_itself_prints_a_witness() {
    let p = fixture("example2_two_real_park.json");
    let o = run(&["--json", "isomorphic", &p, &p]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["isomorphic"], true);
    assert_eq!(v["witness"]["edges"]["chordW"], "chordW");
}

#[test]
fn negative_answers_exit_with_one() {
    let o = run(&["isomorphic", &fixture("example1_park.json"), &fixture("example2_no_real_park.json")]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["validate", &fixture("f3_monodromy.json"), "--strict"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"degree": 2, "cone_points": 1}"#).unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["info", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["single-hurwitz", "0", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--degree", "2"]).status.code(), Some(2));
}

#[test]
fn limits_exit_with_three() {
    assert_eq!(run(&["single-hurwitz", "0", "7"]).status.code(), Some(3));
    assert_eq!(run(&["--max-degree", "3", "single-hurwitz", "0", "4"]).status.code(), Some(3));
    let o = run(&["--max-sheets", "4", "validate", &fixture("f3_monodromy.json")]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["enumerate", "--degree", "6", "--cone", "1", "--corner", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn extract_then_validate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "f3_monodromy.json",
        "two_real_monodromy.json",
        "example1_monodromy.json",
        "two_entrances_monodromy.json",
    ] {
        let out = dir.path().join(name);
        let o = run(&["extract", &fixture(name), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(run(&["validate-park", out.to_str().unwrap()]).status.code(), Some(0), "{name}");
        let via_stdout = run(&["extract", &fixture(name)]);
        assert_eq!(stdout(&via_stdout), std::fs::read_to_string(&out).unwrap().trim());
    }
}

#[test]
fn enumerate_reports_classes() {
    let o = run(&["--json", "enumerate", "--degree", "3", "--cone", "2", "--corner", "0", "--dedup", "park"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class_count"], 2);
    assert_eq!(v["raw_count"], 12);
}

#[test]
fn hurwitz_of_a_park() {
    assert_eq!(stdout(&run(&["hurwitz", &fixture("two_entrances_park.json")])), "1/2");
}

#[test]
fn cache_file_is_written_when_requested() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("memo.json");
    let o = Command::new(env!("CARGO_BIN_EXE_parkscope"))
        .args(["single-hurwitz", "0", "2,2"])
        .env("PARKSCOPE_CACHE", &cache)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&cache).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["0:2,2"].as_str().unwrap(), stdout(&o));
}
