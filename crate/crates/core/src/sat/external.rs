//! Running a DIMACS solver as a subprocess.

use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::cdcl::SolveResult;
use super::cnf::{Cnf, Lit};
use super::SatError;

/// Interpret solver output: an `s SATISFIABLE` / `s UNSATISFIABLE` status
/// (or bare `SAT` / `UNSAT`) followed by model literals on `v` lines or bare
/// integer lines. Unlisted variables default to false.
pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<SolveResult, SatError> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize];
    for line in text.lines().map(str::trim) {
        let status_word = line.strip_prefix("s ").unwrap_or(line);
        match status_word {
            "SATISFIABLE" | "SAT" => {
                status = Some(true);
                continue;
            }
            "UNSATISFIABLE" | "UNSAT" => {
                status = Some(false);
                continue;
            }
            _ => {}
        }
        let body = line.strip_prefix("v ").unwrap_or(line);
        let nums: Option<Vec<i64>> = body.split_whitespace().map(|t| t.parse().ok()).collect();
        let Some(nums) = nums.filter(|n| !n.is_empty()) else { continue };
        if status != Some(true) && !line.starts_with('v') {
            continue;
        }
        for n in nums {
            if let Some(l) = Lit::from_dimacs(n) {
                if let Some(slot) = model.get_mut(l.var() as usize) {
                    *slot = !l.is_negated();
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(model)),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(SatError::ExternalOutput("no SAT/UNSAT status in solver output".into())),
    }
}

/// Write `cnf` to a temporary file, run `solver <file>`, and read its verdict.
pub fn run_external(solver: &Path, cnf: &Cnf, timeout: Duration) -> Result<SolveResult, SatError> {
    let io = |e: std::io::Error| SatError::ExternalIo(format!("{}: {e}", solver.display()));
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile().map_err(io)?;
    file.write_all(cnf.to_dimacs().as_bytes()).map_err(io)?;
    file.flush().map_err(io)?;
    let mut child = Command::new(solver)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(io)?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let deadline = Instant::now() + timeout;
    loop {
        if child.try_wait().map_err(io)?.is_some() {
            break;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SolveResult::Timeout);
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    let text = reader.join().map_err(|_| SatError::ExternalIo("reader thread panicked".into()))?.map_err(io)?;
    let result = parse_solver_output(&text, cnf.num_vars())?;
    if let SolveResult::Sat(m) = &result {
        if !cnf.satisfied_by(m) {
            return Err(SatError::ExternalOutput("solver model does not satisfy the formula".into()));
        }
    }
    Ok(result)
}
