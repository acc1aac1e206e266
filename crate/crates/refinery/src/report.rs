//! Rendering check reports as JSON or as line-oriented text.
//!
//! The JSON form is a single compact object with a fixed key order, so equal
//! reports always serialize to identical bytes. Degrees are exact strings.

use std::fmt::Write;

use refinery_core::{Binding, CheckReport, Condition, Prob, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonReport {
    pub check: String,
    pub verdict: String,
    pub failed_condition: Option<String>,
    pub degree: Option<String>,
    pub witnesses: Vec<Map<String, Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(String),
    #[error("unknown verdict {0:?}")]
    Verdict(String),
    #[error(transparent)]
    Condition(#[from] refinery_core::UnknownCondition),
    #[error("invalid degree {0:?}")]
    Degree(String),
    #[error("witness value for {0} is not a string")]
    Witness(String),
}

impl From<&CheckReport> for JsonReport {
    fn from(r: &CheckReport) -> Self {
        JsonReport {
            check: r.check.clone(),
            verdict: r.verdict.as_str().to_string(),
            failed_condition: r.failed_condition.map(|c| c.as_str().to_string()),
            degree: r.degree.as_ref().map(Prob::to_string),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| w.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect())
                .collect(),
        }
    }
}

impl TryFrom<JsonReport> for CheckReport {
    type Error = ReportError;

    /// The attached transformer, if any, is not part of the JSON form; its
    /// pairs survive as witnesses.
    fn try_from(j: JsonReport) -> Result<Self, ReportError> {
        let verdict = match j.verdict.as_str() {
            "pass" => Verdict::Pass,
            "fail" => Verdict::Fail,
            other => return Err(ReportError::Verdict(other.into())),
        };
        let failed_condition = j.failed_condition.map(|c| c.parse::<Condition>()).transpose()?;
        let degree = j.degree.map(|d| d.parse::<Prob>().map_err(|_| ReportError::Degree(d))).transpose()?;
        let witnesses = j
            .witnesses
            .into_iter()
            .map(|w| {
                w.into_iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => Ok((k, s)),
                        _ => Err(ReportError::Witness(k)),
                    })
                    .collect::<Result<Binding, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(CheckReport { check: j.check, verdict, failed_condition, witnesses, degree, transformer: None })
    }
}

pub fn render_json(r: &CheckReport) -> String {
    serde_json::to_string(&JsonReport::from(r)).expect("reports always serialize")
}

pub fn parse_json(s: &str) -> Result<CheckReport, ReportError> {
    let j: JsonReport = serde_json::from_str(s).map_err(|e| ReportError::Json(e.to_string()))?;
    CheckReport::try_from(j)
}

fn paint(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

/// Text form: a verdict line, then the degree, witnesses and any extra
/// notes, one per line.
pub fn render_text(r: &CheckReport, notes: &[String], color: bool) -> String {
    let mut out = String::new();
    match (r.verdict, r.failed_condition) {
        (Verdict::Pass, _) => writeln!(out, "{}: {}", r.check, paint("pass", "32", color)).unwrap(),
        (Verdict::Fail, Some(c)) => writeln!(out, "{}: {} ({c})", r.check, paint("FAIL", "31", color)).unwrap(),
        (Verdict::Fail, None) => writeln!(out, "{}: {}", r.check, paint("FAIL", "31", color)).unwrap(),
    }
    if let Some(d) = &r.degree {
        writeln!(out, "  degree: {d}").unwrap();
    }
    if !r.witnesses.is_empty() {
        let label = if r.passed() { "pair" } else { "witness" };
        for (i, w) in r.witnesses.iter().enumerate() {
            writeln!(out, "  {label} {}: {w}", i + 1).unwrap();
        }
    }
    for n in notes {
        writeln!(out, "  note: {n}").unwrap();
    }
    out
}
