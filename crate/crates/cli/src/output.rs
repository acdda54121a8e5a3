//! Report records, one JSON object per line, followed by a single footer.

use std::collections::BTreeMap;
use std::io::{self, Write};

use pseudostop_core::montecarlo::{Expectation, McReport};
use pseudostop_core::report::{Condition, Witness};
use pseudostop_core::CheckReport;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Names of checks whose failing property is itself a counterexample.
const CHARACTERIZATIONS: [&str; 3] = ["ny2", "pseudoH", "hloc"];

/// `true` when the record refutes something: its conditions disagree, or a
/// characterization reports its property failing on a concrete witness.
pub fn is_counterexample(report: &CheckReport) -> bool {
    !report.agree
        || (CHARACTERIZATIONS.contains(&report.name.as_str())
            && !report.all_true()
            && report.witness.is_some())
}

/// What a record was computed for, beyond the instance itself.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Subject {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub instance_ms: f64,
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    check: &'a str,
    #[serde(flatten)]
    subject: &'a Subject,
    instance_digest: &'a str,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<bool>,
    conditions: &'a [Condition],
    #[serde(skip_serializing_if = "<[Condition]>::is_empty")]
    facts: &'a [Condition],
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a Witness>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    notes: &'a BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<&'a Timing>,
}

pub fn write_check(
    out: &mut dyn Write,
    report: &CheckReport,
    subject: &Subject,
    with_counterexample: bool,
    timing: Option<&Timing>,
) -> io::Result<()> {
    let record = CheckRecord {
        check: &report.name,
        subject,
        instance_digest: &report.instance_digest,
        agree: report.agree,
        counterexample: with_counterexample.then(|| is_counterexample(report)),
        conditions: &report.conditions,
        facts: &report.facts,
        witness: report.witness.as_ref(),
        notes: &report.notes,
        timing,
    };
    write_line(out, &record)
}

/// A float printed in scientific notation with 17 significant digits;
/// non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Serialize)]
struct McRecord<'a> {
    mc: &'a str,
    n_paths: u64,
    estimate: Sci,
    stderr: Sci,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks_statistic: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks_threshold: Option<Sci>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<Sci>,
    expectation: Expectation,
    passed: bool,
    wide_tolerance: bool,
    degenerate: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    extra: BTreeMap<&'a str, Sci>,
}

pub fn write_mc(out: &mut dyn Write, report: &McReport) -> io::Result<()> {
    let record = McRecord {
        mc: &report.estimator,
        n_paths: report.n_paths,
        estimate: Sci(report.estimate),
        stderr: Sci(report.stderr),
        target: report.target.map(Sci),
        ks_statistic: report.ks_statistic.map(Sci),
        ks_threshold: report.ks_threshold.map(Sci),
        seed: report.seed,
        dt: report.dt.map(Sci),
        expectation: report.expectation,
        passed: report.passed,
        wide_tolerance: report.wide_tolerance,
        degenerate: report.degenerate,
        extra: report.extra.iter().map(|(k, v)| (k.as_str(), Sci(*v))).collect(),
    };
    write_line(out, &record)
}

/// The last line of every report.
#[derive(Debug, Clone, Serialize)]
pub struct Footer<P: Serialize, X: Serialize> {
    pub trials: u64,
    /// Records with `agree = false` (or, for Monte Carlo, failed estimators).
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexamples: Option<u64>,
    pub seed: Option<u64>,
    pub parameters: P,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<X>,
}

pub fn write_footer<P: Serialize, X: Serialize>(out: &mut dyn Write, footer: &Footer<P, X>) -> io::Result<()> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        footer: &'a T,
    }
    write_line(out, &Wrapped { footer })
}

fn write_line<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}
