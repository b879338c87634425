use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{analyze_file, AnalysisOptions, AnalysisReport, CandidateStatus};
use crate::constraints::PremTemplate;

/// Premise template and bit size for every bench column.
pub const SETTINGS_GRID: [(PremTemplate, u32); 4] =
    [(PremTemplate::Linear, 3), (PremTemplate::Linear, 4), (PremTemplate::Max2, 3), (PremTemplate::Max2, 4)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchMark {
    #[serde(rename = "+")]
    Proved,
    #[serde(rename = "-")]
    NotProved,
    /// The encoding exceeded the clause budget.
    #[serde(rename = "OS")]
    OutOfSpace,
    /// The analysis failed; see the footnotes.
    #[serde(rename = "!")]
    Error,
}

impl BenchMark {
    pub fn from_report(r: &AnalysisReport) -> BenchMark {
        match r.summary_status() {
            Some(CandidateStatus::Proved) => BenchMark::Proved,
            Some(CandidateStatus::EncodingTooLarge) => BenchMark::OutOfSpace,
            _ => BenchMark::NotProved,
        }
    }
}

impl fmt::Display for BenchMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMark::Proved => "+",
            BenchMark::NotProved => "-",
            BenchMark::OutOfSpace => "OS",
            BenchMark::Error => "!",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchCell {
    pub prem: PremTemplate,
    pub bits: u32,
    pub mark: BenchMark,
    pub time_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub program: String,
    pub cells: Vec<BenchCell>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    /// Per-file errors, in row order.
    pub footnotes: Vec<String>,
}

/// Analyze every `.pl` file of `dir` (sorted by name) under each grid setting.
/// Failures of individual files become footnotes.
pub fn bench(dir: &Path, base: &AnalysisOptions) -> std::io::Result<BenchTable> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "pl"))
        .collect();
    files.sort();
    let mut table = BenchTable::default();
    for path in files {
        let program = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut cells = Vec::new();
        let mut failed = None;
        for (prem, bits) in SETTINGS_GRID {
            let opts = AnalysisOptions { prem, bits, ..base.clone() };
            let cell = match analyze_file(&path, &opts) {
                Ok(r) => BenchCell { prem, bits, mark: BenchMark::from_report(&r), time_us: r.timings.total_us },
                Err(e) => {
                    failed.get_or_insert_with(|| e.to_string());
                    BenchCell { prem, bits, mark: BenchMark::Error, time_us: 0 }
                }
            };
            cells.push(cell);
        }
        if let Some(msg) = failed {
            table.footnotes.push(format!("{program}: {msg}"));
        }
        table.rows.push(BenchRow { program, cells });
    }
    Ok(table)
}

impl BenchTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.program.len()).max().unwrap_or(0).max("program".len());
        write!(f, "{:width$}", "program")?;
        for (prem, bits) in SETTINGS_GRID {
            write!(f, "  {:>16}", format!("{prem}/{bits}"))?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:width$}", row.program)?;
            for c in &row.cells {
                let ms = c.time_us as f64 / 1000.0;
                write!(f, "  {:>16}", format!("{} {ms:.1}ms", c.mark))?;
            }
            writeln!(f)?;
        }
        for (i, note) in self.footnotes.iter().enumerate() {
            writeln!(f, "[{}] {note}", i + 1)?;
        }
        Ok(())
    }
}
