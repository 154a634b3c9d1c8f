//! Check records, reports and their JSON/CSV serializations.

use std::fmt;
use std::io::Write;

use maxlip_core::io::format_f64;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::VerifyError;

/// How `lhs` is compared with `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs <= rhs + tolerance`
    Le,
    /// `lhs >= rhs - tolerance`
    Ge,
    /// `|lhs - rhs| <= tolerance`
    Eq,
    /// `lhs > rhs`
    Gt,
}

impl Relation {
    /// Amount by which `lhs` violates the relation (nonpositive when it holds
    /// without tolerance).
    pub fn excess(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => lhs - rhs,
            Relation::Ge => rhs - lhs,
            Relation::Eq => (lhs - rhs).abs(),
            Relation::Gt => {
                if lhs > rhs {
                    rhs - lhs
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let e = self.excess(lhs, rhs);
        match self {
            Relation::Gt => e < 0.0,
            _ => e <= tolerance,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
            Relation::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Monitored,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Monitored => "monitored",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_id: String,
    /// The statement being checked, as a formula.
    pub anchor: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: Status,
    pub witness: String,
}

impl Check {
    /// A pass/fail check. Non-finite sides always fail and are clamped so
    /// the report stays valid JSON.
    pub fn hard(
        id: impl Into<String>,
        anchor: &str,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        witness: String,
    ) -> Self {
        let finite = lhs.is_finite() && rhs.is_finite();
        let status = if finite && relation.holds(lhs, rhs, tolerance) {
            Status::Pass
        } else {
            Status::Fail
        };
        Check::build(id.into(), anchor, relation, lhs, rhs, tolerance, status, witness)
    }

    /// A reported value that never affects the exit code.
    pub fn monitored(
        id: impl Into<String>,
        anchor: &str,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        witness: String,
    ) -> Self {
        Check::build(
            id.into(),
            anchor,
            relation,
            lhs,
            rhs,
            tolerance,
            Status::Monitored,
            witness,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        check_id: String,
        anchor: &str,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        status: Status,
        mut witness: String,
    ) -> Self {
        let clamp = |v: f64| if v.is_finite() { v } else { f64::MAX.copysign(v) };
        if !(lhs.is_finite() && rhs.is_finite()) {
            witness = format!("non-finite (lhs={lhs}, rhs={rhs}); {witness}");
        }
        Check {
            check_id,
            anchor: anchor.to_string(),
            relation,
            lhs: clamp(lhs),
            rhs: clamp(rhs),
            tolerance,
            status,
            witness,
        }
    }

    /// Whether the stated relation holds, regardless of status.
    pub fn holds(&self) -> bool {
        self.relation.holds(self.lhs, self.rhs, self.tolerance)
    }
}

/// Worst case of a relation over many instances, with its witness.
#[derive(Debug, Clone)]
pub struct Sweep {
    relation: Relation,
    worst: Option<(f64, f64, f64, String)>,
    count: usize,
}

impl Sweep {
    pub fn new(relation: Relation) -> Self {
        Sweep {
            relation,
            worst: None,
            count: 0,
        }
    }

    /// Records one instance; the witness is only formatted when it becomes
    /// the new worst case.
    pub fn push(&mut self, lhs: f64, rhs: f64, witness: impl FnOnce() -> String) {
        self.count += 1;
        let e = self.relation.excess(lhs, rhs);
        let e = if e.is_nan() { f64::INFINITY } else { e };
        if self.worst.as_ref().is_none_or(|w| e > w.0) {
            self.worst = Some((e, lhs, rhs, witness()));
        }
    }

    /// Folds another sweep in; ties keep `self`, so merging in index order is
    /// deterministic.
    pub fn merge(&mut self, other: Sweep) {
        self.count += other.count;
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|s| w.0 > s.0) {
                self.worst = Some(w);
            }
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn parts(self) -> (f64, f64, String) {
        let count = self.count;
        match self.worst {
            Some((_, lhs, rhs, w)) => (lhs, rhs, format!("{w} (worst of {count})")),
            None => (0.0, 0.0, "no instances".to_string()),
        }
    }

    pub fn hard(self, id: impl Into<String>, anchor: &str, tolerance: f64) -> Check {
        let rel = self.relation;
        let (lhs, rhs, w) = self.parts();
        Check::hard(id, anchor, rel, lhs, rhs, tolerance, w)
    }

    pub fn monitored(self, id: impl Into<String>, anchor: &str, tolerance: f64) -> Check {
        let rel = self.relation;
        let (lhs, rhs, w) = self.parts();
        Check::monitored(id, anchor, rel, lhs, rhs, tolerance, w)
    }
}

/// Merges sweeps computed in parallel, in order.
pub fn merge_sweeps(relation: Relation, parts: Vec<Sweep>) -> Sweep {
    let mut all = Sweep::new(relation);
    for s in parts {
        all.merge(s);
    }
    all
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub monitored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub tool_version: String,
    pub timestamp: String,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub config: ScenarioConfig,
}

impl Report {
    /// Sorts checks by id and fills in the summary.
    pub fn new(scenario: &str, config: ScenarioConfig, mut checks: Vec<Check>, timestamp: String) -> Self {
        checks.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let mut summary = Summary {
            total: checks.len(),
            ..Summary::default()
        };
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Monitored => summary.monitored += 1,
            }
        }
        Report {
            scenario: scenario.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            summary,
            checks,
            config,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check_id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn from_json(text: &str) -> Result<Report, VerifyError> {
    serde_json::from_str(text).map_err(|e| VerifyError::Config(format!("not a report: {e}")))
}

/// One row per check after a header; numbers use 17 significant digits.
pub fn write_csv<W: Write>(report: &Report, out: W) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| VerifyError::Io(e.to_string());
    w.write_record([
        "check_id",
        "anchor",
        "relation",
        "lhs",
        "rhs",
        "tolerance",
        "status",
        "witness",
    ])
    .map_err(io)?;
    for c in &report.checks {
        w.write_record([
            c.check_id.clone(),
            c.anchor.clone(),
            c.relation.symbol().to_string(),
            format_f64(c.lhs),
            format_f64(c.rhs),
            format_f64(c.tolerance),
            c.status.to_string(),
            c.witness.clone(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<W: Write>(report: &Report, format: Format, mut out: W) -> Result<(), VerifyError> {
    match format {
        Format::Json => {
            out.write_all(to_json(report).as_bytes())?;
            out.write_all(b"\n")?;
            Ok(())
        }
        Format::Csv => write_csv(report, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let checks = vec![
            Check::hard(
                "b.second",
                "x <= y",
                Relation::Le,
                1.0,
                1.0 + 1e-12,
                1e-9,
                "cell 3".into(),
            ),
            Check::hard(
                "a.first",
                "x == 1",
                Relation::Eq,
                1.0 + 1e-3,
                1.0,
                1e-9,
                "cube [0] side 2".into(),
            ),
            Check::monitored("c.ratio", "ratio in range", Relation::Le, 0.7, 1.0, 0.0, "N=64".into()),
        ];
        Report::new("lemmas", ScenarioConfig::default(), checks, "t".into())
    }

    #[test]
    fn summary_and_order() {
        let r = sample();
        assert_eq!(r.checks[0].check_id, "a.first");
        assert_eq!(
            r.summary,
            Summary {
                total: 3,
                pass: 1,
                fail: 1,
                monitored: 1
            }
        );
        assert!(!r.passed());
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        assert_eq!(from_json(&to_json(&r)).unwrap(), r);
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let r = sample();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), r.checks.len());
        assert_eq!(text.lines().count(), r.checks.len() + 1);
        assert!(rows.iter().any(|row| &row[6] == "monitored"));
        assert_eq!(rows[0][3].parse::<f64>().unwrap(), r.checks[0].lhs);
    }

    #[test]
    fn sweep_keeps_worst_instance() {
        let mut s = Sweep::new(Relation::Le);
        s.push(1.0, 2.0, || "a".into());
        s.push(3.0, 2.5, || "b".into());
        s.push(2.0, 2.0, || "c".into());
        let c = s.hard("id", "x", 1e-9);
        assert_eq!(c.status, Status::Fail);
        assert_eq!(c.lhs, 3.0);
        assert!(c.witness.starts_with('b'));
    }

    #[test]
    fn non_finite_values_fail() {
        let c = Check::hard("id", "x", Relation::Le, f64::NAN, 0.0, 1.0, String::new());
        assert_eq!(c.status, Status::Fail);
        assert!(c.lhs.is_finite());
        let g = Check::hard("id", "x", Relation::Gt, 1.0, 1.0, 0.0, String::new());
        assert_eq!(g.status, Status::Fail);
    }
}
