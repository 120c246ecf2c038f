use std::process::{Command, Output};

use serde_json::Value as Json;
use tempfile::tempdir;
use tropdesc::cache::{CacheFile, CACHE_ENV};
use tropdesc::enumerate::{evaluate_seeded, OracleOptions};
use tropdesc::{parse_invariant, parse_value};

fn tdesc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdesc")).args(args).env_remove(CACHE_ENV).output().expect("run tdesc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn headline_compute() {
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn enumerate_line_through_two_points() {
    let o = tdesc(&["enumerate", "<tau_0(2)^2>_1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn exit_codes() {
    let cases = [
        (vec!["compute", "<tau_0(2)>_1"], 3),
        (vec!["enumerate", "<tau_0(2)>_1"], 3),
        (vec!["compute", "<tau_1(1) tau_0(2)>_1"], 4),
        (vec!["compute", "<tau_2(0) tau_0(2)>_1"], 4),
        (vec!["compute", "<tau_1(1) tau_1(1) tau_0(2)^3>_2"], 4),
        (vec!["enumerate", "<tau_1(1) tau_1(1) tau_0(2)^3>_2"], 4),
        (vec!["compute", "<tau_1(1"], 2),
        (vec!["compute", "tau_0(2)"], 2),
        (vec!["compute", "<tau_0(2)^2>_1", "--base", "sideways"], 2),
        (vec!["frobnicate"], 2),
    ];
    for (args, code) in cases {
        let o = tdesc(&args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty(), "{args:?} printed no diagnostic");
    }
    let o = tdesc(&["compute", "<tau_0(2)>_1"]);
    assert!(stderr(&o).contains("not zero-dimensional"));
}

#[test]
fn missing_base_value() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("empty.cache");
    std::fs::write(&path, "TDESC-CACHE v1\n").unwrap();
    let base = format!("table:{}", path.display());
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--base", &base]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    // no file at all
    let o = tdesc(&["compute", "<tau_0(2)^2>_1", "--base", "table"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn json_values_round_trip() {
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--json", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let j: Json = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(parse_value(j["value"].as_str().unwrap()), parse_value("3"));
    assert_eq!(parse_invariant(j["invariant"].as_str().unwrap()), parse_invariant("<tau_1(1) tau_1(2)^2>_2"));
    let trace = &j["trace"];
    assert_eq!(trace["rule"], "trr");
    assert_eq!(trace["value"], "3");
    assert!(trace["children"].as_array().unwrap().iter().any(|c| c["coefficient"] == "3"));

    let o = tdesc(&["enumerate", "<tau_1(0) tau_0(2)^2>_1", "--seed", "3", "--json"]);
    let j: Json = serde_json::from_str(&stdout(&o)).unwrap();
    let inv = parse_invariant("<tau_1(0) tau_0(2)^2>_1").unwrap();
    let (expected, _) = evaluate_seeded(&inv, 3, &OracleOptions::default()).unwrap();
    assert_eq!(parse_value(j["value"].as_str().unwrap()), Some(expected));
    assert_eq!(j["configuration"]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn trace_text() {
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--trace"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("3"));
    assert!(text.contains("<tau_0(1) tau_0(0)>_0 = 0"));
    assert!(text.contains("3 x product = 3"));
}

#[test]
fn dump_curves() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("curves.json");
    let o = tdesc(&["enumerate", "<tau_1(1) tau_1(2)^2>_2", "--seed", "2", "--dump-curves", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "3");
    let curves: Vec<Json> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!curves.is_empty());
    for c in &curves {
        let lengths = c["lengths"].as_array().unwrap();
        assert!(lengths.iter().all(|l| parse_value(l.as_str().unwrap()).unwrap() > parse_value("0").unwrap()));
        assert!(c["multiplicity"].as_str().unwrap().parse::<u64>().is_ok());
    }
}

#[test]
fn cache_records_and_serves_base_values() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("values.cache");
    let run =
        |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_tdesc")).args(args).env(CACHE_ENV, &path).output().unwrap();
    let o = run(&["compute", "<tau_1(1) tau_1(2)^2>_2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = CacheFile::load(&path).unwrap();
    let base = parse_invariant("<tau_0(2) tau_1(2)^2>_2").unwrap();
    assert_eq!(file.get(&base).unwrap().value, parse_value("1").unwrap());

    // served from the table, no oracle involved
    let o = run(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--base", "table"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "3");

    // the oracle agrees, so recording it again is fine
    let o = run(&["enumerate", "<tau_1(1) tau_1(2)^2>_2", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn wrong_table_value_fails_verification() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("values.cache");
    std::fs::write(
        &path,
        "TDESC-CACHE v1\n<tau_1(1) tau_1(2)^2>_2\t3\toracle\t1,2\n<tau_0(2) tau_1(2)^2>_2\t2\ttable\t-\n",
    )
    .unwrap();
    let base = format!("table:{}", path.display());
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--base", &base]);
    assert_eq!(o.status.code(), Some(6), "{}", stderr(&o));
    assert!(stderr(&o).contains("derived 6"));

    // two entries for one key that disagree
    std::fs::write(&path, "TDESC-CACHE v1\n<tau_0(2)^2>_1\t1\toracle\t1\n<tau_0(2)^2>_1\t2\trecursion\t-\n").unwrap();
    let base = format!("table:{}", path.display());
    let o = tdesc(&["compute", "<tau_1(0) tau_0(2)^2>_1", "--base", &base]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stderr(&o).contains("conflicting"));
}

#[test]
fn verify_exit_codes() {
    let o = tdesc(&["verify", "--max-degree", "1", "--seeds", "3", "--family", "reachable"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 value mismatches"));
    // the literal family contains shapes the rules do not reach
    let o = tdesc(&["verify", "--max-degree", "1", "--seeds", "3", "--max-insertions", "4"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stdout(&o).contains("0 value mismatches"));
    assert!(stderr(&o).contains("recursion unsupported"));
}

#[test]
fn table_outputs() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = tdesc(&["table", "--degree", "1", "--family", "first:4", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("invariant,degree,value,engine,seeds"));
    assert!(text.contains("<tau_0(2)^2>_1,1,1,oracle,1"));
    assert!(text.contains(",oracle,") && text.contains(",recursion,"));

    let json = dir.path().join("t.json");
    let o = tdesc(&["table", "--degree", "1", "--family", "base", "--seeds", "2", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<Json> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r["degree"] == 1 && parse_value(r["value"].as_str().unwrap()).is_some()));

    // a cache-format table feeds compute
    let cache = dir.path().join("base.cache");
    let o = tdesc(&["table", "--degree", "2", "--family", "base:3", "--out", cache.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let base = format!("table:{}", cache.display());
    let o = tdesc(&["compute", "<tau_1(1) tau_1(2)^2>_2", "--base", &base]);
    assert_eq!(stdout(&o).trim(), "3", "{}", stderr(&o));

    let list = dir.path().join("list.txt");
    std::fs::write(&list, "# two invariants\n<tau_0(2)^2>_1\n<tau_0(2)^5>_2\n").unwrap();
    let spec = format!("file:{}", list.display());
    let o = tdesc(&["table", "--family", &spec]);
    assert_eq!(stdout(&o).lines().count(), 3);
}
