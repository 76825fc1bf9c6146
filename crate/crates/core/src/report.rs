//! Check records and JSON-lines verification reports.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Outcome of one numerical check.
///
/// Inequality checks pass when `margin ≥ −tol`; equality checks pass when
/// `|margin| ≤ tol`. Margins are relative unless a check says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn inequality(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            margin,
            tol,
            pass: margin >= -tol,
        }
    }

    pub fn equality(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            margin,
            tol,
            pass: margin.abs() <= tol,
        }
    }

    /// Relative inequality `lhs ≥ rhs`: margin `(lhs − rhs)/|rhs|`.
    pub fn at_least(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::inequality(id, anchor, lhs, rhs, (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE), tol)
    }

    /// Relative equality `lhs = rhs`.
    pub fn close_to(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::equality(id, anchor, lhs, rhs, (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE), tol)
    }

    /// `true` when the margin is inside the tolerance band, i.e. the
    /// inequality is numerically an equality.
    pub fn is_tight(&self) -> bool {
        self.margin.abs() <= self.tol
    }
}

/// Records plus an environment block, serialised as JSON lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub environment: BTreeMap<String, String>,
    pub records: Vec<CheckRecord>,
}

#[derive(Serialize, Deserialize)]
struct EnvironmentLine {
    environment: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        let mut environment = BTreeMap::new();
        environment.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
        VerificationReport { environment, records: Vec::new() }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
    }

    pub fn set_env(&mut self, key: &str, value: impl ToString) {
        self.environment.insert(key.to_string(), value.to_string());
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// First line holds the environment block, then one record per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &EnvironmentLine { environment: self.environment.clone() })?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut report = VerificationReport::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(&line)
                .map_err(|e| Error::Input(format!("report line {}: {e}", i + 1)))?;
            if value.get("environment").is_some() {
                let env: EnvironmentLine = serde_json::from_value(value)
                    .map_err(|e| Error::Input(format!("report line {}: {e}", i + 1)))?;
                report.environment.extend(env.environment);
            } else {
                let rec: CheckRecord = serde_json::from_value(value)
                    .map_err(|e| Error::Input(format!("report line {}: {e}", i + 1)))?;
                report.records.push(rec);
            }
        }
        Ok(report)
    }
}

/// Formats a float with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// One line per check: status, id, anchor, margin, tolerance.
pub fn report_summary(report: &VerificationReport) -> String {
    let mut out = String::new();
    if report.records.is_empty() {
        out.push_str("no checks run\n");
        return out;
    }
    let id_w = report.records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let an_w = report.records.iter().map(|r| r.anchor.len()).max().unwrap_or(6).max(6);
    let _ = writeln!(out, "{:<4}  {:<id_w$}  {:<an_w$}  {:>19}  {:>19}", "", "id", "anchor", "margin", "tol");
    for r in &report.records {
        let status = if r.pass { "ok" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status:<4}  {:<id_w$}  {:<an_w$}  {:>19}  {:>19}",
            r.id,
            r.anchor,
            fmt12(r.margin),
            fmt12(r.tol)
        );
    }
    let failed = report.failures().count();
    let _ = writeln!(out, "{} checks, {} failed", report.records.len(), failed);
    out
}
