//! JSON-lines traces and verdict documents.
//!
//! One object per round with fields `n, v, M, V, x, payoff, K, S, triggered,
//! status`. Exact scalars are `"p/q"` strings, float scalars JSON numbers.
//! `status` is `"running"` or `"bankrupt:<first bankrupt round>"`.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::protocol::RoundRecord;
use crate::scalar::Scalar;
use crate::verdict::{PropertyReport, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceLine {
    pub n: u64,
    pub v: Scalar,
    #[serde(rename = "M")]
    pub stake_linear: Scalar,
    #[serde(rename = "V")]
    pub stake_quadratic: Scalar,
    pub x: Scalar,
    pub payoff: Scalar,
    #[serde(rename = "K")]
    pub capital: Scalar,
    #[serde(rename = "S")]
    pub outcome_sum: Scalar,
    pub triggered: bool,
    pub status: String,
}

fn status_label(bankrupt_at: Option<u64>) -> String {
    match bankrupt_at {
        None => "running".to_owned(),
        Some(round) => format!("bankrupt:{round}"),
    }
}

/// Trace lines for `records`, with the running game status attached.
pub fn trace_lines(records: &[RoundRecord]) -> Vec<TraceLine> {
    let mut bankrupt_at = None;
    records
        .iter()
        .map(|r| {
            if bankrupt_at.is_none() && r.capital_after.is_negative() {
                bankrupt_at = Some(r.n);
            }
            TraceLine {
                n: r.n,
                v: r.variance.clone(),
                stake_linear: r.stake_linear.clone(),
                stake_quadratic: r.stake_quadratic.clone(),
                x: r.outcome.clone(),
                payoff: r.payoff.clone(),
                capital: r.capital_after.clone(),
                outcome_sum: r.outcome_sum_after.clone(),
                triggered: r.triggered,
                status: status_label(bankrupt_at),
            }
        })
        .collect()
}

pub fn write_trace<W: Write>(records: &[RoundRecord], mut out: W) -> std::io::Result<()> {
    for line in trace_lines(records) {
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_trace_file(path: &Path, records: &[RoundRecord]) -> Result<(), Error> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(records, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Parses a trace, checking that each line's status matches its ledger.
pub fn read_trace<R: BufRead>(path: &Path, reader: R) -> Result<Vec<RoundRecord>, Error> {
    let format_error = |line: usize, reason: String| Error::TraceFormat {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut records = Vec::new();
    let mut bankrupt_at = None;
    for (i, text) in reader.lines().enumerate() {
        let text = text.map_err(|e| Error::io(path, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let line: TraceLine = serde_json::from_str(&text).map_err(|e| format_error(i + 1, e.to_string()))?;
        if bankrupt_at.is_none() && line.capital.is_negative() {
            bankrupt_at = Some(line.n);
        }
        if line.status != status_label(bankrupt_at) {
            return Err(format_error(
                i + 1,
                format!("status {:?} but capital history gives {:?}", line.status, status_label(bankrupt_at)),
            ));
        }
        records.push(RoundRecord {
            n: line.n,
            variance: line.v,
            stake_linear: line.stake_linear,
            stake_quadratic: line.stake_quadratic,
            outcome: line.x,
            payoff: line.payoff,
            capital_after: line.capital,
            outcome_sum_after: line.outcome_sum,
            triggered: line.triggered,
        });
    }
    Ok(records)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<RoundRecord>, Error> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(path, BufReader::new(file))
}

/// `<out>.verdict.json`.
pub fn verdict_path(trace_path: &Path) -> PathBuf {
    let mut name = OsString::from(trace_path.as_os_str());
    name.push(".verdict.json");
    PathBuf::from(name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub verdict: Verdict,
    pub properties: PropertyReport,
}

impl VerdictDocument {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("verdict serializes");
        text.push('\n');
        text
    }
}

pub fn write_verdict_file(path: &Path, doc: &VerdictDocument) -> Result<(), Error> {
    fs::write(path, doc.to_json()).map_err(|e| Error::io(path, e))
}

pub fn read_verdict_file(path: &Path) -> Result<VerdictDocument, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::TraceFormat {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })
}
