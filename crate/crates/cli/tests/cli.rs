use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

const RIGID: &str = r#"{"k": 2,
  "A": [[1, 0, 0], ["1/4", "-1/4", "1/4"], [0, 0, 1]],
  "B": [["1/4", "3/4", "9/4"], ["1/4", "-1/4", "1/4"], [1, "1/4", "1/16"]]}"#;
const FLEXIBLE: &str = r#"{"k": 2,
  "A": [[1, 2, 4], [1, 3, 9], [1, 4, 16]],
  "B": [[1, 5, 25], [1, 6, 36], [1, 7, 49]]}"#;
// a1 ∥ a2
const DEGENERATE: &str = r#"{"k": 2,
  "A": [[1, 2, 4], [4, 8, 16], [1, 0, 0]],
  "B": [[1, 1, 1], [1, -2, 4], ["1/4", "3/2", 9]]}"#;
const DERANGEMENT: &str = r#"{"k": 2,
  "A": [[1, 0, 0], [0, 0, 1], [1, -1, 1]],
  "B": [[0, 0, 1], [1, 0, 0], [1, 1, 1]]}"#;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn input(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psdrigid")).args(args).output().unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn uniqueness_of_rigid_example() {
    let d = scratch("uniq");
    let f = input(&d, "rigid.json", RIGID);
    for extra in [&[][..], &["--exact"][..]] {
        let mut args = vec!["uniqueness", path(&f)];
        args.extend(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v = json_of(&o);
        assert_eq!(v["globally_rigid"], json!(true));
        assert_eq!(v["witness_triple"], json!([[1, 2, 3], [1, 2, 3]]));
        assert_eq!(v["tolerance"], json!(1e-9));
    }
}

#[test]
fn classify_flexible_example() {
    let d = scratch("flex");
    let f = input(&d, "flex.json", FLEXIBLE);
    let o = run(&["classify", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["one_inf_rigid"], json!(false));
    assert_eq!(v["motion"].as_array().unwrap().len(), 3);
}

#[test]
fn degenerate_input_is_refused() {
    let d = scratch("degenerate");
    let f = input(&d, "deg.json", DEGENERATE);
    let o = run(&["classify", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_of(&o);
    assert_eq!(v["preconditions_met"], json!(false));
    let viol = v["violations"].as_array().unwrap();
    assert!(viol.iter().any(|s| s.as_str().unwrap().contains("a1") && s.as_str().unwrap().contains("a2")), "{viol:?}");
}

#[test]
fn malformed_json_names_path() {
    let d = scratch("malformed");
    let f = input(&d, "bad.json", r#"{"k": 2, "A": [[1, 0, 0], [1, true, 0]], "B": [[1, 0, 0]]}"#);
    let o = run(&["classify", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.A[1][1]"));
    let o = run(&["classify", path(&d.join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_inputs_exit_one() {
    let d = scratch("malformed_many");
    let cases = [
        "",
        "[]",
        "{}",
        r#"{"k": 0, "A": [[1]], "B": [[1]]}"#,
        r#"{"k": 2, "A": [], "B": [[1, 0, 0]]}"#,
        r#"{"k": 2, "A": [[1, 0]], "B": [[1, 0, 0]]}"#,
        r#"{"k": 2, "A": [[1, 0, "x"]], "B": [[1, 0, 0]]}"#,
        r#"{"k": 2, "A": [[1, 0, 0]], "B": [[1, 0, 0]], "M": [[1, 2]]}"#,
        r#"{"k": 2, "A": [[1, 0, 0]], "B": [[1, 0, "1/0"]]}"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let f = input(&d, &format!("case{i}.json"), text);
        for cmd in ["classify", "validate", "boundary", "motions"] {
            let o = run(&[cmd, path(&f)]);
            assert_eq!(o.status.code(), Some(1), "{cmd} on {text:?}");
        }
    }
}

#[test]
fn validate_reports_mismatch_without_failing() {
    let d = scratch("validate");
    let f = input(&d, "m.json", &RIGID.replace("}", r#", "M": [[1, 0, 1], [0, 1, 0], [1, 0, 1]]}"#));
    let o = run(&["validate", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["valid"], json!(false));
    assert!(!v["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn boundary_and_two_orth() {
    let d = scratch("boundary");
    let r = input(&d, "rigid.json", RIGID);
    let v = json_of(&run(&["boundary", path(&r)]));
    assert_eq!(v["verdict"], json!("boundary_consistent"));
    let g = input(&d, "der.json", DERANGEMENT);
    let o = run(&["boundary", path(&g)]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_of(&run(&["classify", path(&g)]));
    assert_eq!(v["two_inf_rigid"], json!(true));
    assert_eq!(v["zero_count"], json!(3));
}

#[test]
fn motions_report() {
    let d = scratch("motions");
    let f = input(&d, "rigid.json", RIGID);
    let v = json_of(&run(&["motions", path(&f)]));
    assert_eq!(v["trivial_basis"].as_array().unwrap().len(), 4);
    assert_eq!(v["cone_rank"], json!(5));
    assert_eq!(v["motion_space"]["kind"], json!("trivial_only"));
    assert_eq!(v["cone_full_dimensional"], json!(false));
    let f = input(&d, "flex.json", FLEXIBLE);
    let v = json_of(&run(&["motions", path(&f)]));
    assert_eq!(v["motion_space"]["kind"], json!("cone_flex"));
}

#[test]
fn oracle_needs_seed() {
    let d = scratch("oracle");
    let f = input(&d, "rigid.json", RIGID);
    assert_eq!(run(&["oracle", path(&f)]).status.code(), Some(1));
    let o = run(&["oracle", path(&f), "--seed", "1", "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["found_nontrivial"], json!(false));
    let f = input(&d, "flex.json", FLEXIBLE);
    let v = json_of(&run(&["oracle", path(&f), "--seed", "1", "--s", "1"]));
    assert_eq!(v["found_nontrivial"], json!(true));
}

#[test]
fn generate_corpus() {
    let d = scratch("generate");
    let out = d.join("free");
    let o = run(&["generate", "--p", "3", "--q", "3", "--count", "10", "--seed", "7", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let entries = manifest.as_array().unwrap();
    assert_eq!(entries.len(), 10);
    for e in entries {
        assert!(out.join(e["file"].as_str().unwrap()).exists());
        assert_eq!(e["zero_count"], json!(0));
    }
    let tally = json_of(&o);
    assert_eq!(tally["two_inf_rigid"].as_u64().unwrap() + tally["flexible"].as_u64().unwrap(), 10);

    // reproducible
    let again = d.join("again");
    run(&["generate", "--p", "3", "--q", "3", "--count", "10", "--seed", "7", "--out", path(&again)]);
    assert_eq!(fs::read(out.join("instance_0003.json")).unwrap(), fs::read(again.join("instance_0003.json")).unwrap());
    assert_eq!(fs::read(out.join("manifest.json")).unwrap(), fs::read(again.join("manifest.json")).unwrap());

    let two = d.join("two");
    let o = run(&[
        "generate",
        "--p",
        "3",
        "--q",
        "3",
        "--zero",
        "1,1",
        "--zero",
        "2,2",
        "--count",
        "5",
        "--seed",
        "7",
        "--out",
        path(&two),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(two.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["verdicts"]["two_inf_rigid"] == json!(true) && e["zero_count"] == json!(2)));

    let empty = d.join("empty");
    let o = run(&["generate", "--p", "3", "--q", "3", "--count", "0", "--seed", "7", "--out", path(&empty)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(empty.join("manifest.json")).unwrap().trim(), "[]");

    let o = run(&["generate", "--p", "2", "--q", "3", "--seed", "7", "--out", path(&d.join("bad"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_stable_and_text_renders() {
    let d = scratch("stable");
    let f = input(&d, "flex.json", FLEXIBLE);
    let a = run(&["classify", path(&f)]).stdout;
    let b = run(&["classify", path(&f)]).stdout;
    assert_eq!(a, b);
    let out = d.join("report.txt");
    let o = run(&["classify", path(&f), "--format", "text", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(out).unwrap();
    assert!(text.contains("one_inf_rigid: false"), "{text}");
    assert_eq!(run(&["classify", path(&f), "--tol=-1"]).status.code(), Some(1));
    assert_eq!(run(&["classify"]).status.code(), Some(1));
}
