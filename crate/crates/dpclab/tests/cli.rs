use std::process::Command;

use dpclab::cli::run;

fn dpclab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("dpclab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn ra_has_nine_pairs() {
    let (code, out, _) = dpclab(&["dp", "--example", "Ra"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.contains(" -> ")).count(), 9);
    assert!(out.contains("∘#(i(x),∘(y,∘(z,w))) -> ∘#(y,w)"));
}

#[test]
fn rb_progenitor_graph_as_dot() {
    let (code, out, _) = dpclab(&["pgraph", "--example", "Rb", "--trace", "traces/fig1.trace", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert_eq!(out.matches("[label=").count(), 5);
    assert_eq!(out.matches(" -> ").count(), 2);
    for n in ["t1@", "t1@1", "t1@1.1", "t2@1", "t2@1.1"] {
        assert!(out.contains(&format!("label=\"{n}\"")), "{n}");
    }
}

#[test]
fn progeny_suite_on_rde() {
    let (code, out, _) = dpclab(&["check", "progeny", "--example", "Rde", "--random", "200", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS progeny:Rde:")).count(), 200);
    assert!(out.ends_with("200/200 passed\n"));
}

#[test]
fn graph_json_schema() {
    let (code, out, _) = dpclab(&["graph", "--example", "Rb", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 0);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
    let sccs = v["sccs"].as_array().unwrap();
    assert_eq!(sccs.len(), 2);
    assert!(sccs.iter().all(|c| c["trivial"] == true));
}

#[test]
fn report_json_schema() {
    let (code, out, _) = dpclab(&["check", "srs", "--example", "Re", "--random", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        for key in ["check", "pass", "lhs", "rhs", "witness"] {
            assert!(r.get(key).is_some(), "{key} missing in {r}");
        }
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn csv_has_header_and_one_row_per_check() {
    let (code, out, _) = dpclab(&["check", "g", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("check,pass,lhs,rel,rhs,witness"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 46);
    assert!(rows.iter().all(|r| r.contains(",true,")));

    let (code, out, _) = dpclab(&["measure", "--example", "Rde", "--max-size", "4", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn measure_rde() {
    let (code, out, _) = dpclab(&["measure", "--example", "Rde", "--max-size", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mode"], "dc");
    let values: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["value"].as_u64().unwrap()).collect();
    assert_eq!(values, [0, 1, 4, 18, 262]);
}

#[test]
fn derive_and_replay() {
    let (code, out, _) = dpclab(&["derive", "--example", "Re", "--term", "d(s(s(0)))", "--strategy", "li"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with("s(s(s(s(d(0)))))"), "{out}");
    let (code, out, _) = dpclab(&["parse", "--example", "Rd", "--trace", "rd.trace"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn simgen_round_trips() {
    let (code, out, _) = dpclab(&["simgen", "--example", "Rb", "--sim-f", "const:1"]);
    assert_eq!(code, 0);
    let trs = dpclab::term::parse_trs(&out).unwrap();
    assert_eq!(trs.len(), 24);
    assert!(out.starts_with("(COMMENT a = 2, C = 2, k = 2"));
}

#[test]
fn simulate_rb_trace() {
    let (code, out, err) = dpclab(&["simulate", "--example", "Rb", "--trace", "fig1.trace", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn usable_rules_of_rebin() {
    let (code, out, _) = dpclab(&["usable", "--example", "Rebin"]);
    assert_eq!(code, 0);
    assert!(out.contains("d(0) -> 0") && out.contains("d(s(x)) -> s(s(d(x)))"));
    assert!(!out.contains("e(0,x) -> x"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["nonsense"][..],
        &["dp", "--example", "Nope"],
        &["dp", "--example", "Ra", "--bogus"],
        &["parse", "--example", "Rb", "--trace", "/nonexistent/x.trace"],
        &["check", "nosuchsuite"],
        &["derive", "--example", "Rb", "--term", "f("],
        &["check", "ackermann", "--example", "Rb"],
    ] {
        let (code, out, err) = dpclab(args);
        assert_eq!(code, 2, "{args:?}: {out}{err}");
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("dpclab: "), "{err}");
    }
}

#[test]
fn failed_check_exits_1() {
    let dir = std::env::temp_dir().join(format!("dpclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("weak.alg");
    std::fs::write(&path, "s(n) = n+1\nd(n) = n\n0 = 0\n").unwrap();
    let (code, out, _) = dpclab(&["check", "algebra", "--example", "Re", "--algebra", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn help_exits_0() {
    let (code, out, _) = dpclab(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("pgraph"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dpclab");
    let ok = Command::new(bin).args(["dp", "--example", "Rde"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).matches(" -> ").count(), 2);
    let bad = Command::new(bin).args(["dp"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
