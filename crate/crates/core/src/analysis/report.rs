use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constraints::PremTemplate;
use crate::engine::{ConcreteOutcome, NodeId};

/// Outcome for one loop candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStatus {
    /// A model exists and the witness query ran past the oracle budget.
    Proved,
    /// No branch of the constraint system has a model within the bit size.
    NoModel,
    /// Some branch exceeded the clause budget and no branch proved.
    EncodingTooLarge,
    Timeout,
    /// A model was found but the concrete run of the witness terminated.
    OracleRejected,
    /// The candidate's arithmetic falls outside what constraints can express.
    Unsupported,
}

impl fmt::Display for CandidateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateStatus::Proved => "proved",
            CandidateStatus::NoModel => "no-model",
            CandidateStatus::EncodingTooLarge => "encoding-too-large",
            CandidateStatus::Timeout => "timeout",
            CandidateStatus::OracleRejected => "oracle-rejected",
            CandidateStatus::Unsupported => "unsupported",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub begin: NodeId,
    pub end: NodeId,
    /// The restricted query class, with labelled variables.
    pub class_query: String,
    pub reachability: Vec<String>,
    pub status: CandidateStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Which `=\=` branch produced the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
    /// Values of the unknowns, by display name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<ConcreteOutcome>,
    /// Size of the largest formula handed to the solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cnf_size: Option<CnfSize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfSize {
    pub variables: u32,
    pub clauses: usize,
}

/// Wall-clock time per phase, in microseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub parse_us: u64,
    pub tree_us: u64,
    pub candidates_us: u64,
    pub constraints_us: u64,
    pub encode_us: u64,
    pub solve_us: u64,
    pub oracle_us: u64,
    pub total_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub bits: u32,
    pub prem: PremTemplate,
    pub rep: usize,
    pub node_cap: usize,
    pub oracle_budget: u64,
    pub clause_budget: usize,
    pub timeout_secs: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub program: String,
    pub query: String,
    pub settings: Settings,
    pub tree_nodes: usize,
    /// The node cap stopped tree construction.
    pub tree_truncated: bool,
    pub candidates: Vec<CandidateReport>,
    pub timings: Timings,
}

impl AnalysisReport {
    pub fn proved(&self) -> bool {
        self.candidates.iter().any(|c| c.status == CandidateStatus::Proved)
    }

    /// The strongest status over all candidates, in the order proved,
    /// encoding-too-large, timeout, anything else. `None` without candidates.
    pub fn summary_status(&self) -> Option<CandidateStatus> {
        let has = |s: CandidateStatus| self.candidates.iter().any(|c| c.status == s);
        [CandidateStatus::Proved, CandidateStatus::EncodingTooLarge, CandidateStatus::Timeout]
            .into_iter()
            .find(|s| has(s.clone()))
            .or_else(|| self.candidates.first().map(|c| c.status.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<AnalysisReport> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "program: {}", self.program)?;
        writeln!(f, "query: {}", self.query)?;
        writeln!(
            f,
            "settings: bits={} prem={} rep={}{}",
            self.settings.bits,
            self.settings.prem,
            self.settings.rep,
            if self.tree_truncated { " (tree truncated)" } else { "" }
        )?;
        writeln!(f, "tree: {} nodes, {} loop candidates", self.tree_nodes, self.candidates.len())?;
        for c in &self.candidates {
            writeln!(f, "candidate N{} -> N{}: {}", c.begin, c.end, c.status)?;
            writeln!(f, "  class: {}", c.class_query)?;
            if !c.reachability.is_empty() {
                writeln!(f, "  reachable when: {}", c.reachability.join(", "))?;
            }
            if let Some(m) = &c.message {
                writeln!(f, "  note: {m}")?;
            }
            if let Some(model) = &c.model {
                let parts: Vec<String> = model.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(f, "  model: {}", parts.join(" "))?;
            }
            if let Some(w) = &c.witness {
                writeln!(f, "  witness: {w}")?;
            }
            if let Some(o) = &c.oracle {
                writeln!(f, "  oracle: {o:?}")?;
            }
        }
        let verdict = if self.proved() {
            "non-terminating"
        } else if self.candidates.is_empty() {
            "no loop candidates"
        } else {
            "not proved"
        };
        writeln!(f, "verdict: {verdict} ({} us)", self.timings.total_us)
    }
}
