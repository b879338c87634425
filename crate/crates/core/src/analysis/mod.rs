//! End-to-end analysis: parse, build the moded tree, find loops, solve their
//! constraints, and confirm each witness with a bounded concrete run.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use thiserror::Error;

use crate::constraints::{
    diophantine_system, normalize, symbolic_system, to_natural_form, DiophantineSystem, NormalBranch, PremTemplate,
    Sym, SymbolicSystem,
};
use crate::engine::{build_tree, eval, run_concrete, ConcreteOutcome, ModedTree, TreeConfig};
use crate::nonterm::{find_candidates, LoopCandidate};
use crate::sat::{self, check_model, decode, encode, EncodeError, IntegerModel, SolveResult, SolverConfig};
use crate::syntax::{ParseError, Program, SourceFile, Subst, Term, VarId};

mod bench;
mod report;

pub use bench::{bench, BenchCell, BenchMark, BenchRow, BenchTable, SETTINGS_GRID};
pub use report::{AnalysisReport, CandidateReport, CandidateStatus, CnfSize, Settings, Timings};

/// Steps given to the concrete run of a witness.
pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Magnitude bits per unknown.
    pub bits: u32,
    pub prem: PremTemplate,
    pub tree: TreeConfig,
    pub oracle_budget: u64,
    pub clause_budget: usize,
    /// Wall-clock budget for the whole analysis of one program.
    pub time_budget: Duration,
    pub external_solver: Option<PathBuf>,
    /// Write every formula handed to the solver into this directory.
    pub emit_dimacs: Option<PathBuf>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            bits: 3,
            prem: PremTemplate::Linear,
            tree: TreeConfig::default(),
            oracle_budget: DEFAULT_ORACLE_BUDGET,
            clause_budget: sat::DEFAULT_CLAUSE_BUDGET,
            time_budget: sat::DEFAULT_TIMEOUT,
            external_solver: None,
            emit_dimacs: None,
        }
    }
}

impl AnalysisOptions {
    fn settings(&self) -> Settings {
        Settings {
            bits: self.bits,
            prem: self.prem,
            rep: self.tree.rep,
            node_cap: self.tree.node_cap,
            oracle_budget: self.oracle_budget,
            clause_budget: self.clause_budget,
            timeout_secs: self.time_budget.as_secs(),
            solver: self.external_solver.as_ref().map(|p| p.display().to_string()),
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("bit size {0} outside {min}..={max}", min = sat::encode::MIN_BITS, max = sat::encode::MAX_BITS)]
    Bits(u32),
    #[error("cannot write DIMACS file {path}: {source}")]
    Emit { path: String, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] sat::SatError),
}

/// A candidate whose constraints have a verified model.
#[derive(Clone, Debug)]
pub struct SolvedCandidate {
    pub candidate: LoopCandidate,
    pub system: SymbolicSystem,
    pub branch: NormalBranch,
    pub diophantine: DiophantineSystem,
    pub model: IntegerModel,
    pub witness: Term,
    pub oracle: ConcreteOutcome,
}

/// The report plus the intermediate objects behind it.
#[derive(Clone, Debug)]
pub struct AnalysisDetail {
    pub report: AnalysisReport,
    pub program: Program,
    pub tree: ModedTree,
    pub solved: Vec<SolvedCandidate>,
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

pub fn analyze_file(path: &Path, opts: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    analyze_file_detailed(path, opts).map(|d| d.report)
}

pub fn analyze_file_detailed(path: &Path, opts: &AnalysisOptions) -> Result<AnalysisDetail, AnalysisError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| AnalysisError::Io { path: name.clone(), source })?;
    analyze_source_detailed(&text, &name, opts)
}

pub fn analyze_source(text: &str, name: &str, opts: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    analyze_source_detailed(text, name, opts).map(|d| d.report)
}

pub fn analyze_source_detailed(
    text: &str,
    name: &str,
    opts: &AnalysisOptions,
) -> Result<AnalysisDetail, AnalysisError> {
    if !(sat::encode::MIN_BITS..=sat::encode::MAX_BITS).contains(&opts.bits) {
        return Err(AnalysisError::Bits(opts.bits));
    }
    let start = Instant::now();
    let deadline = start + opts.time_budget;
    let mut timings = Timings::default();
    let parse_err = |source| AnalysisError::Parse { path: name.to_string(), source };
    let file = SourceFile::parse(text).map_err(parse_err)?;
    let query = file.query().map_err(parse_err)?;
    timings.parse_us = micros(start.elapsed());

    let t = Instant::now();
    let tree = build_tree(&file.program, &query, opts.tree);
    timings.tree_us = micros(t.elapsed());

    let t = Instant::now();
    let candidates = find_candidates(&tree);
    timings.candidates_us = micros(t.elapsed());

    let mut ctx = Ctx { program: &file.program, tree: &tree, opts, deadline, timings, name };
    let mut reports = Vec::new();
    let mut solved = Vec::new();
    for cand in &candidates {
        let (r, s) = ctx.candidate(cand)?;
        reports.push(r);
        solved.extend(s);
    }
    let mut timings = ctx.timings;
    timings.total_us = micros(start.elapsed());
    let report = AnalysisReport {
        program: name.to_string(),
        query: query.source_text.clone(),
        settings: opts.settings(),
        tree_nodes: tree.nodes.len(),
        tree_truncated: tree.truncated,
        candidates: reports,
        timings,
    };
    Ok(AnalysisDetail { report, program: file.program, tree, solved })
}

struct Ctx<'a> {
    program: &'a Program,
    tree: &'a ModedTree,
    opts: &'a AnalysisOptions,
    deadline: Instant,
    timings: Timings,
    name: &'a str,
}

impl Ctx<'_> {
    fn candidate(&mut self, cand: &LoopCandidate) -> Result<(CandidateReport, Option<SolvedCandidate>), AnalysisError> {
        let mut report = CandidateReport {
            begin: cand.begin,
            end: cand.end,
            class_query: cand.class_query.atom.moded(),
            reachability: Vec::new(),
            status: CandidateStatus::NoModel,
            message: None,
            branch: None,
            model: None,
            witness: None,
            oracle: None,
            cnf_size: None,
        };
        let t = Instant::now();
        let built = symbolic_system(self.tree, cand).map_err(|e| e.to_string()).and_then(|sys| {
            let branches = normalize(&to_natural_form(&sys))?;
            Ok((sys, branches))
        });
        self.timings.constraints_us += micros(t.elapsed());
        let (system, branches) = match built {
            Ok(b) => b,
            Err(msg) => {
                report.status = CandidateStatus::Unsupported;
                report.message = Some(msg);
                return Ok((report, None));
            }
        };
        report.reachability = system.reachability.iter().map(ToString::to_string).collect();

        let mut too_large = false;
        let mut timed_out = false;
        let mut rejected = None;
        for (i, branch) in branches.iter().enumerate() {
            let t = Instant::now();
            let dio = diophantine_system(branch, self.opts.prem);
            self.timings.constraints_us += micros(t.elapsed());

            let t = Instant::now();
            let encoded = encode(&dio, self.opts.bits, self.opts.clause_budget);
            self.timings.encode_us += micros(t.elapsed());
            let (cnf, vm) = match encoded {
                Ok(e) => e,
                Err(EncodeError::TooLarge { .. }) => {
                    too_large = true;
                    continue;
                }
                Err(EncodeError::BitsOutOfRange(b)) => return Err(AnalysisError::Bits(b)),
            };
            let size = CnfSize { variables: cnf.num_vars(), clauses: cnf.clauses.len() };
            if report.cnf_size.is_none_or(|s| s.clauses < size.clauses) {
                report.cnf_size = Some(size);
            }
            self.emit(cand, i, &cnf)?;

            let remaining = self.deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                timed_out = true;
                break;
            }
            let cfg = SolverConfig { external: self.opts.external_solver.clone(), timeout: remaining };
            let t = Instant::now();
            let result = sat::solve(&cnf, &cfg)?;
            self.timings.solve_us += micros(t.elapsed());
            let assignment = match result {
                SolveResult::Sat(a) => a,
                SolveResult::Unsat => continue,
                SolveResult::Timeout => {
                    timed_out = true;
                    break;
                }
            };
            let model = decode(&assignment, &vm);
            assert!(check_model(&dio, &model), "decoded model violates its own system: {}", dio.to_json());

            let witness = witness_query(self.tree, cand, &system, &model);
            let t = Instant::now();
            let oracle = run_concrete(self.program, &witness, self.opts.oracle_budget);
            self.timings.oracle_us += micros(t.elapsed());

            report.branch = (branches.len() > 1).then_some(i);
            report.model = Some(model.values.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect());
            report.witness = Some(witness.to_string());
            report.oracle = Some(oracle);
            if matches!(oracle, ConcreteOutcome::BudgetExceeded(_)) {
                report.status = CandidateStatus::Proved;
                let solved = SolvedCandidate {
                    candidate: cand.clone(),
                    system,
                    branch: branch.clone(),
                    diophantine: dio,
                    model,
                    witness,
                    oracle,
                };
                return Ok((report, Some(solved)));
            }
            rejected = Some(oracle);
        }
        report.status = if timed_out {
            CandidateStatus::Timeout
        } else if too_large {
            CandidateStatus::EncodingTooLarge
        } else if rejected.is_some() {
            CandidateStatus::OracleRejected
        } else {
            CandidateStatus::NoModel
        };
        if report.status != CandidateStatus::OracleRejected {
            report.model = None;
            report.witness = None;
            report.oracle = None;
            report.branch = None;
        }
        Ok((report, None))
    }

    fn emit(&self, cand: &LoopCandidate, branch: usize, cnf: &sat::Cnf) -> Result<(), AnalysisError> {
        let Some(dir) = &self.opts.emit_dimacs else { return Ok(()) };
        let stem = Path::new(self.name).file_stem().and_then(|s| s.to_str()).unwrap_or("program");
        let path = dir.join(format!("{stem}-{}-{}-{branch}.cnf", cand.begin, cand.end));
        let err = |source| AnalysisError::Emit { path: path.display().to_string(), source };
        std::fs::create_dir_all(dir).map_err(err)?;
        std::fs::write(&path, cnf.to_dimacs()).map_err(err)
    }
}

/// The class query with the model's integers for its integer variables, the
/// constant `a` for its other input variables, and integer arguments evaluated.
pub fn witness_query(tree: &ModedTree, cand: &LoopCandidate, system: &SymbolicSystem, model: &IntegerModel) -> Term {
    let values: HashMap<&VarId, &BigInt> =
        system.query_symbols.iter().filter_map(|(v, s): &(VarId, Sym)| model.get(s).map(|val| (v, val))).collect();
    let mut subst = Subst::new();
    for v in cand.class_query.atom.vars() {
        if let Some(val) = values.get(&v.id) {
            subst.insert(v.id.clone(), Term::Int((*val).clone()));
        } else if v.is_input() {
            subst.insert(v.id.clone(), Term::atom("a"));
        }
    }
    let atom = cand.class_query.atom.apply(&subst);
    let integer_args: Vec<bool> =
        tree.query.atom.args().iter().map(|a| a.as_var().is_some_and(|v| v.is_integer())).collect();
    match &atom {
        Term::App(name, args) => {
            let args = args
                .iter()
                .zip(integer_args.iter().chain(std::iter::repeat(&false)))
                .map(|(a, &int)| if int { eval(a).map(Term::Int).unwrap_or_else(|| a.clone()) } else { a.clone() })
                .collect();
            Term::App(name.clone(), args)
        }
        other => other.clone(),
    }
}

/// Name → value view of a model, for callers that only know display names.
pub fn model_by_name(m: &IntegerModel) -> BTreeMap<String, BigInt> {
    m.values.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}
