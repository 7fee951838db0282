//! Suite reports and their JSON, CSV and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    /// Not applicable for these parameters (for example `r > n`).
    Skipped,
    /// A hypothesis of the checked statement does not hold for the input.
    HypothesisViolation,
}

impl CaseStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CaseStatus::Pass => "pass",
            CaseStatus::Fail => "fail",
            CaseStatus::Skipped => "skipped",
            CaseStatus::HypothesisViolation => "hypothesis_violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    /// Short description of what went into the case.
    pub inputs: BTreeMap<String, Value>,
    /// `None` when no residual was computed.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub status: CaseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseResult {
    /// Pass iff `residual < threshold`.
    pub fn measured(id: impl Into<String>, inputs: BTreeMap<String, Value>, residual: f64, threshold: f64) -> Self {
        let pass = residual.is_finite() && residual < threshold;
        CaseResult {
            id: id.into(),
            inputs,
            residual: residual.is_finite().then_some(residual),
            threshold,
            pass,
            status: if pass { CaseStatus::Pass } else { CaseStatus::Fail },
            note: (!residual.is_finite()).then(|| format!("non-finite residual {residual}")),
        }
    }

    /// A case whose residual is compared with exact zero.
    pub fn exact(id: impl Into<String>, inputs: BTreeMap<String, Value>, residual: f64, all_zero: bool) -> Self {
        CaseResult {
            id: id.into(),
            inputs,
            residual: Some(residual),
            threshold: 0.0,
            pass: all_zero,
            status: if all_zero { CaseStatus::Pass } else { CaseStatus::Fail },
            note: None,
        }
    }

    pub fn skipped(id: impl Into<String>, inputs: BTreeMap<String, Value>, threshold: f64, why: &str) -> Self {
        CaseResult {
            id: id.into(),
            inputs,
            residual: None,
            threshold,
            pass: true,
            status: CaseStatus::Skipped,
            note: Some(why.to_string()),
        }
    }

    pub fn violation(
        id: impl Into<String>,
        inputs: BTreeMap<String, Value>,
        residual: Option<f64>,
        threshold: f64,
        why: String,
    ) -> Self {
        CaseResult {
            id: id.into(),
            inputs,
            residual,
            threshold,
            pass: false,
            status: CaseStatus::HypothesisViolation,
            note: Some(why),
        }
    }

    pub fn failed(id: impl Into<String>, inputs: BTreeMap<String, Value>, threshold: f64, why: String) -> Self {
        CaseResult {
            id: id.into(),
            inputs,
            residual: None,
            threshold,
            pass: false,
            status: CaseStatus::Fail,
            note: Some(why),
        }
    }
}

/// Run parameters echoed into the report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default)]
    pub r: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub pass: bool,
    pub status: CaseStatus,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub hypothesis_violations: usize,
}

impl Aggregate {
    pub fn of(cases: &[CaseResult]) -> Self {
        let count = |s: CaseStatus| cases.iter().filter(|c| c.status == s).count();
        let pass = cases.iter().all(|c| c.pass);
        let violations = count(CaseStatus::HypothesisViolation);
        let status = if pass {
            CaseStatus::Pass
        } else if violations > 0 {
            CaseStatus::HypothesisViolation
        } else {
            CaseStatus::Fail
        };
        Aggregate {
            pass,
            status,
            passed: count(CaseStatus::Pass),
            failed: count(CaseStatus::Fail),
            skipped: count(CaseStatus::Skipped),
            hypothesis_violations: violations,
        }
    }
}

/// Wall time is kept out of the serialized form so that reports from
/// identical runs compare byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parameters: Parameters,
    pub cases: Vec<CaseResult>,
    pub aggregate: Aggregate,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, parameters: Parameters, cases: Vec<CaseResult>) -> Self {
        let aggregate = Aggregate::of(&cases);
        SuiteReport { suite: suite.into(), parameters, cases, aggregate, wall_time: None }
    }

    pub fn pass(&self) -> bool {
        self.aggregate.pass
    }

    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn cases_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CaseResult> + 'a {
        self.cases.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Pretty JSON with object keys in sorted order.
    pub fn to_json(&self) -> String {
        // `Value` objects are ordered maps, which sorts every key
        let value = serde_json::to_value(self).expect("reports contain only finite numbers");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `suite,case_id,residual,threshold,pass`, one row per case.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "case_id", "residual", "threshold", "pass"]).expect("in-memory write");
        for c in &self.cases {
            let residual = c.residual.map(|r| format!("{r:e}")).unwrap_or_default();
            w.write_record([
                self.suite.as_str(),
                c.id.as_str(),
                residual.as_str(),
                format!("{:e}", c.threshold).as_str(),
                if c.pass { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii output")
    }

    /// Aligned table for terminals.
    pub fn to_text(&self) -> String {
        let width = self.cases.iter().map(|c| c.id.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "suite {}", self.suite);
        let _ = writeln!(out, "{:<width$}  {:>11}  {:>9}  status", "case", "residual", "threshold");
        for c in &self.cases {
            let residual = c.residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into());
            let _ = write!(out, "{:<width$}  {:>11}  {:>9.1e}  {}", c.id, residual, c.threshold, c.status.label());
            if let Some(note) = &c.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        let a = &self.aggregate;
        let _ = write!(
            out,
            "aggregate: {} ({} passed, {} failed, {} skipped, {} hypothesis violations)",
            a.status.label().to_uppercase(),
            a.passed,
            a.failed,
            a.skipped,
            a.hypothesis_violations
        );
        if let Some(t) = self.wall_time {
            let _ = write!(out, " in {:.2}s", t.as_secs_f64());
        }
        out.push('\n');
        out
    }
}

/// Builds an `inputs` map from `(key, value)` pairs.
#[macro_export]
macro_rules! inputs {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = ::std::collections::BTreeMap::<String, ::serde_json::Value>::new();
        $( m.insert($k.to_string(), ::serde_json::json!($v)); )*
        m
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        let cases = vec![
            CaseResult::measured("a", crate::inputs!("n" => 3), 1.0 / 3.0 * 1e-12, 1e-10),
            CaseResult::skipped("b", crate::inputs!("r" => 4), 1e-10, "r > n"),
        ];
        let mut p = Parameters { n: Some(3), r: vec![2, 4], ..Default::default() };
        p.tolerances.insert("algebra".into(), 1e-10);
        SuiteReport::new("algebra", p, cases)
    }

    #[test]
    fn aggregate_counts_skips_as_pass() {
        let r = sample();
        assert!(r.pass());
        assert_eq!((r.aggregate.passed, r.aggregate.skipped), (1, 1));
    }

    #[test]
    fn failing_case_fails_the_aggregate() {
        let a = Aggregate::of(&[CaseResult::measured("x", BTreeMap::new(), 1.0, 0.5)]);
        assert!(!a.pass);
        assert_eq!(a.status, CaseStatus::Fail);
        let v = Aggregate::of(&[CaseResult::violation("y", BTreeMap::new(), Some(0.2), 1e-6, "gate".into())]);
        assert_eq!(v.status, CaseStatus::HypothesisViolation);
    }

    #[test]
    fn json_round_trips_and_sorts_keys() {
        let r = sample();
        let text = r.to_json();
        assert_eq!(SuiteReport::from_json(&text).unwrap(), r);
        let agg = text.find("\"aggregate\"").unwrap();
        let cases = text.find("\"cases\"").unwrap();
        let suite = text.find("\"suite\"").unwrap();
        assert!(agg < cases && cases < suite);
    }

    #[test]
    fn non_finite_residuals_fail() {
        let c = CaseResult::measured("nan", BTreeMap::new(), f64::NAN, 1.0);
        assert!(!c.pass && c.residual.is_none());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("suite,case_id,residual,threshold,pass"));
        assert!(lines.next().unwrap().starts_with("algebra,a,"));
        assert_eq!(lines.next(), Some("algebra,b,,1e-10,true"));
    }
}
