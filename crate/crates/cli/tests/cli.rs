use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rispaces"))
}

fn job(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("jobs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dist_job_reports_the_de_jonge_value() {
    let o = run(&["--format", "json", "run", job("dist-de-jonge.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0]["value"], 1.0);
    assert_eq!(v["rows"][0]["err_bound"], 0.0);
    assert_eq!(v["details"]["dist"]["path"], "deJonge-closed-form");
}

#[test]
fn cesaro_copy_passes_on_the_flat_function() {
    let o = run(&["run", job("cesaro-copy.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS  cesaro-copy/overall"));
}

#[test]
fn bound_rule_gate_accepts_sum_space() {
    let o = run(&["--require-bound-rule", "run", job("cesaro-copy.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn trivial_ideal_copy_fails_away_from_zero() {
    let o = run(&["--format", "json", "run", job("trivial-ideal-shifted.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let first = &v["details"]["clauses"][0];
    assert_eq!(first["description"], "C(f)(0+) = 1");
    assert_eq!(first["pass"], false);
}

#[test]
fn missing_space_exits_with_a_located_parse_error() {
    let text = "{\"command\": \"norm\",\n \"function\": {\"domain\": \"unit\"}\n}\n";
    let o = run_stdin(&["--format", "json", "run", "-"], text);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["code"], "parse_error");
    assert_eq!(v["error"]["field"], "space");
    assert_eq!(v["error"]["line"], 3);
}

#[test]
fn aliases_and_canonical_ids_agree() {
    let text = std::fs::read_to_string(job("cesaro-copy.json")).unwrap();
    let canonical = text.replace("\"thm41\"", "\"cesaro-copy\"");
    let a = run_stdin(&["--format", "csv", "run", "-"], &text);
    let b = run_stdin(&["--format", "csv", "run", "-"], &canonical);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_follows_the_column_contract() {
    let o = run(&["--format", "csv", "run", job("witness-blocks.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let header = out.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "statement_id,input_digest,value,err_bound,target,tol,pass");
    assert_eq!(out.lines().filter(|l| l.ends_with(",true")).count(), 24);
}

#[test]
fn runs_are_byte_identical() {
    for name in ["dist-de-jonge.json", "norm-marcinkiewicz.json", "discrete-oc.json", "modular.json"] {
        let a = run(&["--format", "json", "run", job(name).to_str().unwrap()]);
        let b = run(&["--format", "json", "run", job(name).to_str().unwrap()]);
        assert_eq!(a.status.code(), Some(0), "{name}: {}", stdout(&a));
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn canonical_form_is_a_fixed_point() {
    for name in ["cesaro-copy.json", "rearrange.json", "norm-marcinkiewicz.json", "modular.json"] {
        let once = run(&["canon", job(name).to_str().unwrap()]);
        assert_eq!(once.status.code(), Some(0));
        let twice = run_stdin(&["canon", "-"], &stdout(&once));
        assert_eq!(once.stdout, twice.stdout, "{name}");
    }
}

#[test]
fn report_filter_selects_one_group() {
    let o = run(&["--format", "csv", "--filter", "de-jonge*", "report"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# seed: "));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("de-jonge/")), "{out}");
}

#[test]
fn loose_engine_tolerance_breaks_luxemburg_rows() {
    let o = run(&["--tol", "0.1", "--filter", "luxemburg-consistency*", "report"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("reproduce: rispaces report --seed"));
}

#[test]
fn bad_format_is_rejected() {
    let o = run(&["--format", "xml", "report"]);
    assert_eq!(o.status.code(), Some(2));
}
