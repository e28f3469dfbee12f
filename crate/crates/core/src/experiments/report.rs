//! Convergence reports and their CSV/JSON forms.
//!
//! CSV columns, in order:
//!
//! | column          | meaning                                             |
//! |-----------------|-----------------------------------------------------|
//! | `experiment_id` | experiment name                                     |
//! | `params`        | `name=value` pairs joined by `;`                    |
//! | `tau`           | checkpoint (`τ`, `ρ` or `T`)                        |
//! | `value`         | finite-height functional                            |
//! | `target`        | limit value                                         |
//! | `deviation`     | `value/target − 1`                                  |
//! | `error_scale`   | size of the expected error term at the checkpoint   |
//! | `extras`        | auxiliary `name=value` pairs joined by `;`          |

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::arithmetic::FermatSummary;
use crate::error::{Error, Result};

/// A named experiment parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Real(f64),
    Integer(i64),
    Text(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Real(v) => write!(f, "{v}"),
            Param::Integer(v) => write!(f, "{v}"),
            Param::Text(v) => f.write_str(v),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Real(v)
    }
}

impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Param::Integer(v)
    }
}

impl From<u32> for Param {
    fn from(v: u32) -> Self {
        Param::Integer(v as i64)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}

/// One checkpoint of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub tau: f64,
    pub value: f64,
    pub target: f64,
    pub deviation: f64,
    pub error_scale: f64,
    pub extras: BTreeMap<String, f64>,
}

impl ReportRow {
    pub fn new(tau: f64, value: f64, target: f64, error_scale: f64) -> Self {
        Self {
            tau,
            value,
            target,
            deviation: value / target - 1.0,
            error_scale,
            extras: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.extras.insert(name.to_string(), value);
        self
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.get(name).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TrendOk,
    TrendViolated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TrendOk => "trend_ok",
            Verdict::TrendViolated => "trend_violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl Verdict {
    /// Trend rule over rows ascending in `τ`.
    ///
    /// `trend_ok` needs `|deviation|` nonincreasing over the last three
    /// checkpoints or the last `|deviation|` below `floor`, and in either case
    /// no larger at the last checkpoint than at the first. A single row is
    /// `inconclusive` unless it is already below the floor.
    pub fn assess(rows: &[ReportRow], floor: f64) -> Verdict {
        let devs: Vec<f64> = rows.iter().map(|r| r.deviation.abs()).collect();
        if devs.is_empty() || devs.iter().any(|d| !d.is_finite()) {
            return Verdict::Inconclusive;
        }
        let last = devs[devs.len() - 1];
        if devs.len() == 1 {
            return if last < floor {
                Verdict::TrendOk
            } else {
                Verdict::Inconclusive
            };
        }
        let tail = &devs[devs.len().saturating_sub(3)..];
        let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
        if (monotone || last < floor) && last <= devs[0] {
            Verdict::TrendOk
        } else {
            Verdict::TrendViolated
        }
    }
}

/// How a Fermat rational separates from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    /// The numeric estimate resolves `q` and lies clear of 1.
    NumericAndExact,
    /// Only the exact arithmetic separates `q` from 1.
    ExactOnly,
    /// `q = 1` exactly.
    EqualsOne,
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separation::NumericAndExact => "numeric and exact separation",
            Separation::ExactOnly => "exact-only separation",
            Separation::EqualsOne => "q = 1",
        })
    }
}

/// Exact side of a Fermat condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactVerdict {
    pub rational: FermatSummary,
    /// `q ≠ 1`, decided on integers.
    pub q_differs_from_one: bool,
    /// Functional value at the largest checkpoint.
    pub numeric_estimate: f64,
    /// `|v − 1| > gap/2` and `|v − q| < gap/2` for the estimate `v`.
    pub numeric_separates: bool,
    pub separation: Separation,
}

impl fmt::Display for ExactVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let relation = if self.q_differs_from_one { "≠" } else { "=" };
        write!(
            f,
            "q={} {relation} 1 (gap {}); {}",
            self.rational.q, self.rational.gap, self.separation
        )
    }
}

/// Witness of `L₂ ≠ 1 ⇔ L₃ ≠ a` at the largest checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceWitness {
    pub l2_minus_one: f64,
    pub l3_minus_a: f64,
    /// Both differences exceed twice their error scale.
    pub resolvable: bool,
    /// Signs agree; only meaningful when resolvable.
    pub signs_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub experiment_id: String,
    pub parameters: BTreeMap<String, Param>,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
    pub floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceWitness>,
}

fn joined<'a, V: fmt::Display + 'a>(pairs: impl Iterator<Item = (&'a String, V)>) -> String {
    pairs
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

impl ConvergenceReport {
    pub fn new(
        experiment_id: impl Into<String>,
        parameters: BTreeMap<String, Param>,
        rows: Vec<ReportRow>,
        floor: f64,
    ) -> Self {
        let verdict = Verdict::assess(&rows, floor);
        Self {
            experiment_id: experiment_id.into(),
            parameters,
            rows,
            verdict,
            floor,
            exact: None,
            equivalence: None,
        }
    }

    pub fn last(&self) -> Option<&ReportRow> {
        self.rows.last()
    }

    pub fn first(&self) -> Option<&ReportRow> {
        self.rows.first()
    }

    pub fn params_string(&self) -> String {
        joined(self.parameters.iter())
    }

    /// Writes the header and one row per checkpoint.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_reports_csv(std::slice::from_ref(self), out)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Writes several reports under a single CSV header.
pub fn write_reports_csv<W: Write>(reports: &[ConvergenceReport], out: W) -> Result<()> {
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "experiment_id",
        "params",
        "tau",
        "value",
        "target",
        "deviation",
        "error_scale",
        "extras",
    ])
    .map_err(ser)?;
    for report in reports {
        let params = report.params_string();
        for row in &report.rows {
            w.write_record([
                report.experiment_id.clone(),
                params.clone(),
                row.tau.to_string(),
                row.value.to_string(),
                row.target.to_string(),
                row.deviation.to_string(),
                row.error_scale.to_string(),
                joined(row.extras.iter()),
            ])
            .map_err(ser)?;
        }
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(devs: &[f64]) -> Vec<ReportRow> {
        devs.iter()
            .enumerate()
            .map(|(i, d)| ReportRow::new(10f64.powi(i as i32 + 3), 1.0 + d, 1.0, 0.1))
            .collect()
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(Verdict::assess(&rows(&[0.3, 0.2, 0.1]), 1e-3), Verdict::TrendOk);
        assert_eq!(Verdict::assess(&rows(&[0.3, 0.1, 0.2]), 1e-3), Verdict::TrendViolated);
        assert_eq!(Verdict::assess(&rows(&[0.03, 7e-4, 9e-4]), 1e-3), Verdict::TrendOk);
        assert_eq!(Verdict::assess(&rows(&[5e-4, 9e-4]), 1e-3), Verdict::TrendViolated);
        assert_eq!(Verdict::assess(&rows(&[0.2]), 1e-3), Verdict::Inconclusive);
        assert_eq!(Verdict::assess(&rows(&[1e-4]), 1e-3), Verdict::TrendOk);
        assert_eq!(Verdict::assess(&[], 1e-3), Verdict::Inconclusive);
        // only the last three checkpoints enter the monotonicity test
        assert_eq!(Verdict::assess(&rows(&[0.5, 0.1, 0.3, 0.2, 0.1]), 1e-3), Verdict::TrendOk);
    }

    #[test]
    fn csv_layout() {
        let mut params = BTreeMap::new();
        params.insert("x".to_string(), Param::Real(1.0));
        params.insert("l".to_string(), Param::Integer(2));
        let r = ConvergenceReport::new("demo", params, vec![ReportRow::new(1e3, 1.1, 1.0, 0.1).with("u", 5.0)], 1e-3);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment_id,params,tau,value,target,deviation,error_scale,extras"
        );
        assert!(lines.next().unwrap().starts_with("demo,l=2;x=1,1000,1.1,1,"));
        assert!(r.to_json().unwrap().contains("\"verdict\": \"inconclusive\""));
    }
}
