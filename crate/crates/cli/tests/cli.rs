use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use looper_core::analysis::AnalysisReport;

fn looper() -> Command {
    Command::new(env!("CARGO_BIN_EXE_looper"))
}

fn program(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

fn run(args: &[&str]) -> Output {
    looper().args(args).output().expect("looper runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TERMINATING: &str = "down(X) :- X > 0, Y is X - 1, down(Y).\ndown(0).\n:- nt_query(down(+int)).\n";

#[test]
fn proved_program_exits_zero() {
    let o = run(&["analyze", program("count_to.pl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("count_to"));
}

#[test]
fn terminating_program_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("down.pl");
    fs::write(&f, TERMINATING).unwrap();
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pl");
    fs::write(&bad, "p(X :- q.\n").unwrap();
    assert_eq!(run(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.pl");
    assert_eq!(run(&["analyze", missing.to_str().unwrap()]).status.code(), Some(2));
    let no_query = dir.path().join("noquery.pl");
    fs::write(&no_query, "p(a).\n").unwrap();
    assert_eq!(run(&["analyze", no_query.to_str().unwrap()]).status.code(), Some(2));
    let p = program("count_to.pl");
    assert_eq!(run(&["analyze", "--bits", "1", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--prem", "cubic", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn json_report_round_trips() {
    let o = run(&["analyze", "--json", "--prem", "max2", program("constants.pl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report = AnalysisReport::from_json(&text).expect("valid report");
    assert!(report.proved());
    assert_eq!(report.settings.bits, 3);
    assert_eq!(report.to_json().trim(), text.trim());
}

#[test]
fn emits_dimacs_and_tree() {
    let dir = tempfile::tempdir().unwrap();
    let p = program("count_to.pl");
    let o = run(&["analyze", "--emit-dimacs", dir.path().to_str().unwrap(), "--emit-tree", "dot", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("digraph"));
    let cnfs: Vec<PathBuf> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!cnfs.is_empty());
    for f in &cnfs {
        assert_eq!(f.extension().and_then(|e| e.to_str()), Some("cnf"));
        assert!(
            fs::read_to_string(f).unwrap().starts_with("p cnf") || fs::read_to_string(f).unwrap().contains("\np cnf")
        );
    }
    let o = run(&["analyze", "--json", "--emit-tree", "json", p.to_str().unwrap()]);
    assert!(AnalysisReport::from_json(&stdout(&o)).is_ok());
    let tree: serde_json::Value = serde_json::from_slice(&o.stderr).expect("tree json on stderr");
    assert!(tree.is_object() || tree.is_array());
}

#[test]
fn dimacs_solve_reports_models() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("sat.cnf");
    fs::write(&sat, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = run(&["dimacs-solve", sat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(stdout(&o), "s SATISFIABLE\nv -1 2 0\n");
    let unsat = dir.path().join("unsat.cnf");
    fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = run(&["dimacs-solve", unsat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "s UNSATISFIABLE\n");
    let bad = dir.path().join("bad.cnf");
    fs::write(&bad, "p cnf x\n").unwrap();
    assert_eq!(run(&["dimacs-solve", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[cfg(unix)]
#[test]
fn external_solver_is_used() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("solver.sh");
    let log = dir.path().join("calls");
    fs::write(
        &script,
        format!(
            "#!/bin/sh\necho call >> '{}'\nexec '{}' dimacs-solve \"$1\"\n",
            log.display(),
            env!("CARGO_BIN_EXE_looper")
        ),
    )
    .unwrap();
    fs::set_permissions(&script, fs::Permissions::from_mode(0o755)).unwrap();
    let o = run(&["analyze", "--solver", script.to_str().unwrap(), program("eq_plus.pl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&log).unwrap().lines().count() >= 1);

    let broken = dir.path().join("broken.sh");
    fs::write(&broken, "#!/bin/sh\necho nonsense\n").unwrap();
    fs::set_permissions(&broken, fs::Permissions::from_mode(0o755)).unwrap();
    let o = run(&["analyze", "--solver", broken.to_str().unwrap(), program("count_to.pl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_prints_grid() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["count_to.pl", "constants.pl", "eq_plus.pl"] {
        fs::copy(program(name), dir.path().join(name)).unwrap();
    }
    fs::write(dir.path().join("down.pl"), TERMINATING).unwrap();
    let o = run(&["bench", "--json", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let text = stdout(&run(&["bench", dir.path().to_str().unwrap()]));
    assert!(text.contains("linear/3") && text.contains("max2/4"));
    let down = text.lines().find(|l| l.starts_with("down")).unwrap();
    assert!(down.contains('-') && !down.contains('+'), "{down}");
    let count = text.lines().find(|l| l.starts_with("count_to")).unwrap();
    assert_eq!(count.matches('+').count(), 4, "{count}");
    assert_eq!(run(&["bench", dir.path().join("nope").to_str().unwrap()]).status.code(), Some(2));
}
