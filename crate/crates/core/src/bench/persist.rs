use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchReport, BenchSummary, PairResult};
use crate::error::{Error, Result};

pub const RESULTS_FILE: &str = "results.json";
pub const ROC_FILE: &str = "roc.csv";

/// Contents of `results.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    /// Set when some pairs failed and were scored as undecided.
    pub partial: bool,
    pub summary: BenchSummary,
    pub records: Vec<PairResult>,
}

/// Writes `results.json` and `roc.csv` into `dir`.
///
/// Floats are written in their shortest round-trip form, so the files are
/// byte-identical for identical reports and reload to the same values.
pub fn persist_results(report: &BenchReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file = ResultsFile {
        partial: report.summary.failures > 0,
        summary: report.summary.clone(),
        records: report.records.clone(),
    };
    let path = dir.join(RESULTS_FILE);
    let mut json = serde_json::to_string_pretty(&file).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;

    let mut csv = String::from("fpr,tpr\n");
    for (fpr, tpr) in &report.roc {
        writeln!(csv, "{fpr},{tpr}").expect("string write");
    }
    let path = dir.join(ROC_FILE);
    fs::write(&path, csv).map_err(|e| Error::io(&path, e))
}

/// Reads back what [`persist_results`] wrote.
pub fn load_results(dir: &Path) -> Result<(ResultsFile, Vec<(f64, f64)>)> {
    let path = dir.join(RESULTS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let file: ResultsFile = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;

    let path = dir.join(ROC_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let bad = |line: &str| {
        Error::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad ROC row `{line}`")),
        )
    };
    let mut lines = text.lines();
    if lines.next() != Some("fpr,tpr") {
        return Err(bad("header"));
    }
    let roc = lines
        .map(|line| {
            let (a, b) = line.split_once(',').ok_or_else(|| bad(line))?;
            Ok((a.parse().map_err(|_| bad(line))?, b.parse().map_err(|_| bad(line))?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok((file, roc))
}
