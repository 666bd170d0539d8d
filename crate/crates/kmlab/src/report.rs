//! Per-check records, suite reports and their JSON/CSV serialization.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed CSV header, in column order.
pub const CSV_COLUMNS: [&str; 10] = [
    "suite",
    "check",
    "param_json",
    "estimate_re",
    "estimate_im",
    "reference_re",
    "reference_im",
    "stderr",
    "score",
    "verdict",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Pole,
    Exploratory,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Pole => "pole",
            Verdict::Exploratory => "exploratory",
        }
    }
}

/// What the `score` column holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    /// |estimate − reference| / stderr.
    Z,
    /// |estimate − reference| against an absolute tolerance.
    Gap,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cplx {
    fn from(z: C64) -> Self {
        Cplx { re: z.re, im: z.im }
    }
}

impl From<f64> for Cplx {
    fn from(x: f64) -> Self {
        Cplx { re: x, im: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: Value,
    pub estimate: Cplx,
    pub reference: Option<Cplx>,
    pub stderr: Option<f64>,
    pub score: Option<f64>,
    pub score_kind: ScoreKind,
    /// Tolerance the score is held to (z threshold or absolute gap).
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Monte-Carlo comparison: pass iff |est − ref| ≤ z_max·stderr.
    pub fn z(name: &str, inputs: Value, est: impl Into<Cplx>, reference: impl Into<Cplx>, stderr: f64, z_max: f64) -> Self {
        let (e, r) = (est.into(), reference.into());
        let d = (e.re - r.re).hypot(e.im - r.im);
        let z = if stderr > 0.0 { d / stderr } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: e,
            reference: Some(r),
            stderr: Some(stderr),
            score: Some(z),
            score_kind: ScoreKind::Z,
            tolerance: Some(z_max),
            verdict: if z <= z_max { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// Deterministic comparison: pass iff |est − ref| < tol.
    pub fn gap(name: &str, inputs: Value, est: impl Into<Cplx>, reference: impl Into<Cplx>, tol: f64) -> Self {
        let (e, r) = (est.into(), reference.into());
        let d = (e.re - r.re).hypot(e.im - r.im);
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: e,
            reference: Some(r),
            stderr: None,
            score: Some(d),
            score_kind: ScoreKind::Gap,
            tolerance: Some(tol),
            verdict: if d < tol { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// A scalar diagnostic held to `value < tol` with no reference value.
    pub fn bound(name: &str, inputs: Value, value: f64, tol: f64) -> Self {
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: value.into(),
            reference: None,
            stderr: None,
            score: Some(value),
            score_kind: ScoreKind::Gap,
            tolerance: Some(tol),
            verdict: if value < tol { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// A yes/no property; the estimate is 1 or 0.
    pub fn flag(name: &str, inputs: Value, ok: bool) -> Self {
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: (ok as u8 as f64).into(),
            reference: Some(1.0.into()),
            stderr: None,
            score: None,
            score_kind: ScoreKind::None,
            tolerance: None,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// Recorded data without a gate.
    pub fn exploratory(name: &str, inputs: Value, est: impl Into<Cplx>, reference: Option<Cplx>) -> Self {
        let e = est.into();
        let score = reference.map(|r| (e.re - r.re).hypot(e.im - r.im));
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: e,
            reference,
            stderr: None,
            score,
            score_kind: if score.is_some() { ScoreKind::Gap } else { ScoreKind::None },
            tolerance: None,
            verdict: Verdict::Exploratory,
            note: None,
        }
    }

    /// The reference could not be evaluated at these inputs.
    pub fn pole(name: &str, inputs: Value, what: impl ToString) -> Self {
        CheckRecord {
            name: name.into(),
            inputs,
            estimate: f64::NAN.into(),
            reference: None,
            stderr: None,
            score: None,
            score_kind: ScoreKind::None,
            tolerance: None,
            verdict: Verdict::Pole,
            note: Some(what.to_string()),
        }
    }

    pub fn with_stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Downgrades a gated record to exploratory, keeping its numbers.
    pub fn exploratory_only(mut self) -> Self {
        self.verdict = Verdict::Exploratory;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub pole: usize,
    pub exploratory: usize,
}

impl Tally {
    pub fn of(checks: &[CheckRecord]) -> Self {
        let mut t = Tally::default();
        for c in checks {
            match c.verdict {
                Verdict::Pass => t.pass += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::Pole => t.pole += 1,
                Verdict::Exploratory => t.exploratory += 1,
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub version: String,
    pub seed: u64,
    pub config: Value,
    pub notes: Vec<String>,
    pub tally: Tally,
    pub checks: Vec<CheckRecord>,
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, config: Value, notes: Vec<String>, checks: Vec<CheckRecord>, wall_time_s: f64) -> Self {
        SuiteReport {
            suite: suite.into(),
            version: VERSION.into(),
            seed,
            config,
            notes,
            tally: Tally::of(&checks),
            checks,
            wall_time_s,
        }
    }

    pub fn failed(&self) -> bool {
        self.tally.fail > 0
    }

    /// Pretty JSON. Non-finite floats become null.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall time removed; identical for identical (seed,
    /// config, version).
    pub fn to_json_deterministic(&self) -> String {
        SuiteReport { wall_time_s: 0.0, ..self.clone() }.to_json()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for c in &self.checks {
            let r = c.reference;
            w.write_record([
                self.suite.clone(),
                c.name.clone(),
                c.inputs.to_string(),
                fmt17(Some(c.estimate.re)),
                fmt17(Some(c.estimate.im)),
                fmt17(r.map(|r| r.re)),
                fmt17(r.map(|r| r.im)),
                fmt17(c.stderr),
                fmt17(c.score),
                c.verdict.as_str().to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Seventeen significant digits; empty for missing values.
pub fn fmt17(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(v) if v.is_nan() => "NaN".into(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf".into() } else { "-inf".into() },
        Some(v) => format!("{v:.16e}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected json or csv)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct EmitError {
    pub path: PathBuf,
    pub source: std::io::Error,
}

/// Writes `<dir>/<suite>.json` and/or `<dir>/<suite>.csv`.
pub fn emit(report: &SuiteReport, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError { path: dir.into(), source })?;
    let mut out = Vec::new();
    for f in formats {
        let (ext, body) = match f {
            Format::Json => ("json", report.to_json()),
            Format::Csv => ("csv", report.to_csv()),
        };
        let path = dir.join(format!("{}.{ext}", report.suite));
        let mut file = fs::File::create(&path).map_err(|source| EmitError { path: path.clone(), source })?;
        file.write_all(body.as_bytes()).map_err(|source| EmitError { path: path.clone(), source })?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> SuiteReport {
        let checks = vec![
            CheckRecord::z("a", json!({"n": 2}), C64::new(0.5, 0.1), C64::new(0.5, 0.0), 0.05, 4.0),
            CheckRecord::gap("b", json!({"x": [1.0, 2.5]}), 1.0 / 3.0, 0.3, 1e-3),
            CheckRecord::exploratory("c", json!({}), 2.0, None),
            CheckRecord::pole("d", json!({"lam": 0.0}), "pole at 0"),
        ];
        SuiteReport::new("demo", 7, json!({}), vec![], checks, 0.25)
    }

    #[test]
    fn verdicts_and_tally() {
        let r = sample();
        assert_eq!(r.tally, Tally { pass: 1, fail: 1, pole: 1, exploratory: 1 });
        assert!(r.failed());
        assert_eq!(r.checks[0].score, Some(0.1 / 0.05));
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = SuiteReport::new("empty", 1, json!({}), vec![], vec![], 0.0);
        assert_eq!(r.to_csv(), CSV_COLUMNS.join(",") + "\n");
        assert!(!r.failed());
    }

    #[test]
    fn csv_round_trips_numbers() {
        let r = sample();
        let text = r.to_csv();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
        let rows: Vec<csv::StringRecord> = rd.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), r.checks.len());
        for (row, c) in rows.iter().zip(&r.checks) {
            if !c.estimate.re.is_nan() {
                assert_eq!(row[3].parse::<f64>().unwrap(), c.estimate.re);
            }
            assert_eq!(row[4].parse::<f64>().unwrap(), c.estimate.im);
            assert_eq!(row[9], *c.verdict.as_str());
            let p: Value = serde_json::from_str(&row[2]).unwrap();
            assert_eq!(p, c.inputs);
        }
        assert_eq!(rows[1][3].parse::<f64>().unwrap(), 1.0 / 3.0);
        let fails = rows.iter().filter(|r| &r[9] == "fail").count();
        assert_eq!(fails, r.tally.fail);
    }

    #[test]
    fn fmt17_digits() {
        assert_eq!(fmt17(Some(0.1)), "1.0000000000000001e-1");
        assert_eq!(fmt17(None), "");
        assert_eq!(fmt17(Some(-2.0)), "-2.0000000000000000e0");
    }
}
