//! Report formats for check records: comma-separated rows with a fixed
//! header, and a nested JSON variant. Reals are written with 17 significant
//! digits so reports diff cleanly between runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::checks::{CheckKind, CheckRecord, Verdict};
use crate::error::{GeomError, Result};

pub const HEADER: [&str; 15] = [
    "case",
    "name",
    "anchor",
    "kind",
    "verdict",
    "lhs",
    "rhs",
    "ratio",
    "margin",
    "tolerance",
    "seed",
    "p",
    "t",
    "equality_case",
    "detail",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Rows,
    Structured,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub holds: usize,
    pub equality_case: usize,
    pub violated: usize,
    pub rejected: usize,
    pub error: usize,
}

impl Tally {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::EqualityCase => self.equality_case += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Rejected => self.rejected += 1,
            Verdict::Error => self.error += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds + self.equality_case + self.violated + self.rejected + self.error
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: Tally,
    pub by_check: BTreeMap<String, Tally>,
    /// Worst ratio shortfall below one (inequalities) or worst margin
    /// (identities), per check.
    pub worst: BTreeMap<String, f64>,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Summary {
        let mut s = Summary::default();
        for r in records {
            s.total.add(r.verdict);
            s.by_check.entry(r.name.clone()).or_default().add(r.verdict);
            let score = match (r.kind, r.ratio, r.margin) {
                (CheckKind::Inequality, Some(ratio), _) if r.verdict != Verdict::EqualityCase => 1.0 - ratio,
                (CheckKind::Inequality, Some(ratio), _) => (ratio - 1.0).abs(),
                (CheckKind::Identity, _, Some(m)) => m,
                _ => continue,
            };
            let w = s.worst.entry(r.name.clone()).or_insert(f64::NEG_INFINITY);
            *w = w.max(score);
        }
        s
    }

    pub fn violations(&self) -> usize {
        self.total.violated
    }

    pub fn errors(&self) -> usize {
        self.total.error
    }

    pub fn is_clean(&self) -> bool {
        self.violations() == 0 && self.errors() == 0
    }

    /// Human-readable summary ending with the `violations:` and `errors:`
    /// lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, t) in &self.by_check {
            let worst = self.worst.get(name).map(|w| format!("{w:.3e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{name:<18} holds={:<4} equality={:<3} violated={:<3} rejected={:<3} error={:<3} worst={worst}",
                t.holds, t.equality_case, t.violated, t.rejected, t.error
            );
        }
        let _ = writeln!(out, "records: {}", self.total.total());
        let _ = writeln!(out, "violations: {}", self.violations());
        let _ = writeln!(out, "errors: {}", self.errors());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

fn real(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> GeomError {
    GeomError::Parse(format!("csv: {e}"))
}

pub fn render_rows(records: &[CheckRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.case.to_string(),
            r.name.clone(),
            r.anchor.clone(),
            match r.kind {
                CheckKind::Inequality => "inequality".into(),
                CheckKind::Identity => "identity".into(),
            },
            r.verdict.as_str().into(),
            real(r.lhs),
            real(r.rhs),
            real(r.ratio),
            real(r.margin),
            real(Some(r.tolerance)),
            r.seed.to_string(),
            real(r.p),
            r.t.map(|t| t.to_string()).unwrap_or_default(),
            r.equality_case.to_string(),
            r.detail.clone(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| GeomError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| GeomError::Parse(e.to_string()))
}

pub fn render_structured(records: &[CheckRecord]) -> Result<String> {
    let report = StructuredReport { summary: Summary::of(records), records: records.to_vec() };
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| GeomError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(records: &[CheckRecord], format: Format) -> Result<String> {
    match format {
        Format::Rows => render_rows(records),
        Format::Structured => render_structured(records),
    }
}

fn opt<T: std::str::FromStr>(field: &str, what: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| GeomError::Parse(format!("bad {what} `{field}`")))
}

fn req<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    opt(field, what)?.ok_or_else(|| GeomError::Parse(format!("missing {what}")))
}

pub fn parse_rows(text: &str) -> Result<Vec<CheckRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(csv_error)?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(GeomError::Parse("unexpected report header".into()));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_error)?;
        let f = |i: usize| row.get(i).unwrap_or("");
        let kind = match f(3) {
            "inequality" => CheckKind::Inequality,
            "identity" => CheckKind::Identity,
            other => return Err(GeomError::Parse(format!("bad kind `{other}`"))),
        };
        let verdict = [Verdict::Holds, Verdict::EqualityCase, Verdict::Violated, Verdict::Rejected, Verdict::Error]
            .into_iter()
            .find(|v| v.as_str() == f(4))
            .ok_or_else(|| GeomError::Parse(format!("bad verdict `{}`", f(4))))?;
        out.push(CheckRecord {
            case: req(f(0), "case")?,
            name: f(1).to_string(),
            anchor: f(2).to_string(),
            kind,
            verdict,
            lhs: opt(f(5), "lhs")?,
            rhs: opt(f(6), "rhs")?,
            ratio: opt(f(7), "ratio")?,
            margin: opt(f(8), "margin")?,
            tolerance: req(f(9), "tolerance")?,
            seed: req(f(10), "seed")?,
            p: opt(f(11), "p")?,
            t: opt(f(12), "t")?,
            equality_case: req(f(13), "equality_case")?,
            detail: f(14).to_string(),
        });
    }
    Ok(out)
}

/// Reads either report format, detected from the first character.
pub fn parse_report(text: &str) -> Result<Vec<CheckRecord>> {
    if text.trim_start().starts_with('{') {
        let r: StructuredReport = serde_json::from_str(text).map_err(|e| GeomError::Parse(e.to_string()))?;
        Ok(r.records)
    } else {
        parse_rows(text)
    }
}
