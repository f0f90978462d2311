//! Suite execution and report emission.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ToleranceConfig;
use crate::verify::registry::{lookup, run_trial, validate_overrides, ExponentOverrides, TrialContext, CASES};
use crate::verify::InequalityCheckReport;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: u64,
    pub tolerances: ToleranceConfig,
    pub cases: Vec<String>,
    pub format: OutputFormat,
    #[serde(skip)]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "ExponentOverrides::is_empty")]
    pub overrides: ExponentOverrides,
    #[serde(skip)]
    pub timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dims: (2..=6).collect(),
            trials: 200,
            tolerances: ToleranceConfig::default(),
            cases: CASES.iter().map(|c| c.id.to_string()).collect(),
            format: OutputFormat::Json,
            jobs: None,
            overrides: ExponentOverrides::default(),
            timestamp: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > 64) {
            return Err(Error::Precondition(format!("dims must lie in 1..=64, got {:?}", self.dims)));
        }
        if self.cases.is_empty() {
            return Err(Error::Precondition("no cases selected".into()));
        }
        self.tolerances.validate()?;
        for c in &self.cases {
            validate_overrides(c, &self.overrides)?;
        }
        Ok(())
    }
}

/// Outcome of one (case, dim, trial) job.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub case_id: String,
    pub dim: usize,
    pub trial: u64,
    pub result: std::result::Result<InequalityCheckReport, Error>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case_id: String,
    pub trials: u64,
    pub asserted: u64,
    pub held: u64,
    pub falsified: u64,
    pub errors: u64,
    /// Exploratory trials that did not hold.
    pub exploratory_failures: u64,
    pub min_gap: Option<f64>,
    pub worst_severity: Option<f64>,
    pub witnesses: u64,
    pub witnesses_verified: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcomes: Vec<TrialOutcome>,
    pub summaries: Vec<CaseSummary>,
    pub exit_code: i32,
}

/// Exit code for a failed trial.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Dominance { .. } => 1,
        Error::SearchExhausted { .. } => 4,
        Error::Parse(_) => 2,
        _ => 3,
    }
}

fn jobs_for(cfg: &RunConfig) -> Result<Vec<(String, usize, u64)>> {
    let mut jobs = Vec::new();
    for id in &cfg.cases {
        let spec = lookup(id)?;
        if spec.single_shot {
            jobs.push((id.clone(), 3, 0));
            continue;
        }
        for &dim in &cfg.dims {
            for trial in 0..cfg.trials {
                jobs.push((id.clone(), dim, trial));
            }
        }
    }
    Ok(jobs)
}

/// Runs every job; results come back in (case, dim, trial) order whatever
/// the scheduling.
pub fn run(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let jobs = jobs_for(cfg)?;
    let exec = |(case_id, dim, trial): &(String, usize, u64)| {
        let ctx = TrialContext { seed: cfg.seed, dim: *dim, trial: *trial, tol: cfg.tolerances, overrides: cfg.overrides };
        TrialOutcome { case_id: case_id.clone(), dim: *dim, trial: *trial, result: run_trial(case_id, &ctx) }
    };
    let outcomes: Vec<TrialOutcome> = match cfg.jobs {
        Some(1) => jobs.iter().map(exec).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::NumericFailure(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(exec).collect()),
        None => jobs.par_iter().map(exec).collect(),
    };
    let summaries = summarize(&cfg.cases, &outcomes, &cfg.tolerances);
    let exit_code = exit_code(&outcomes);
    Ok(RunResult { outcomes, summaries, exit_code })
}

/// 1 for a falsified asserted check, else 3 for numeric failures, else 4 for
/// an exhausted search, else 0.
pub fn exit_code(outcomes: &[TrialOutcome]) -> i32 {
    let mut codes = outcomes.iter().map(|o| match &o.result {
        Ok(r) if r.asserted && !r.holds => 1,
        Ok(_) => 0,
        Err(e) => error_exit_code(e),
    });
    let all: Vec<i32> = codes.by_ref().collect();
    [1, 3, 2, 4].into_iter().find(|c| all.contains(c)).unwrap_or(0)
}

pub fn summarize(cases: &[String], outcomes: &[TrialOutcome], tol: &ToleranceConfig) -> Vec<CaseSummary> {
    let mut by_case: BTreeMap<&str, CaseSummary> = BTreeMap::new();
    for o in outcomes {
        let s = by_case
            .entry(o.case_id.as_str())
            .or_insert_with(|| CaseSummary { case_id: o.case_id.clone(), ..CaseSummary::default() });
        s.trials += 1;
        match &o.result {
            Err(_) => s.errors += 1,
            Ok(r) => {
                if r.asserted {
                    s.asserted += 1;
                    if r.holds {
                        s.held += 1;
                    } else {
                        s.falsified += 1;
                    }
                } else if !r.holds {
                    s.exploratory_failures += 1;
                }
                s.min_gap = Some(s.min_gap.map_or(r.gap, |g| g.min(r.gap)));
                let sev = r.gap / r.slack.max(f64::MIN_POSITIVE);
                s.worst_severity = Some(s.worst_severity.map_or(sev, |g| g.min(sev)));
                if let Some(w) = &r.witness {
                    s.witnesses += 1;
                    if w.is_structurally_valid(tol) && w.certified() {
                        s.witnesses_verified += 1;
                    }
                }
            }
        }
    }
    cases.iter().filter_map(|c| by_case.remove(c.as_str())).collect()
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Header {
        schema_version: &'static str,
        tool_version: &'static str,
        config: &'a RunConfig,
        #[serde(skip_serializing_if = "Option::is_none")]
        timestamp: Option<u64>,
    },
    Report {
        dim: usize,
        #[serde(flatten)]
        report: &'a InequalityCheckReport,
    },
    Error {
        case_id: &'a str,
        dim: usize,
        trial: u64,
        kind: &'static str,
        message: String,
    },
    Summary {
        cases: &'a [CaseSummary],
        exit_code: i32,
    },
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Shape(_) => "shape",
        Error::NonFinite { .. } => "non-finite",
        Error::NotHermitian { .. } => "not-hermitian",
        Error::NotPsd { .. } => "not-psd",
        Error::NumericFailure(_) => "numeric-failure",
        Error::Domain { .. } => "domain",
        Error::Singular(_) => "singular",
        Error::Precondition(_) => "precondition",
        Error::Dominance { .. } => "dominance",
        Error::SearchExhausted { .. } => "search-exhausted",
        Error::Tolerance(_) => "tolerance",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn line<W: Write>(out: &mut W, rec: &Record) -> Result<()> {
    serde_json::to_writer(&mut *out, rec)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// JSON lines: a header, one record per trial, and a closing summary.
pub fn write_json<W: Write>(cfg: &RunConfig, res: &RunResult, out: &mut W) -> Result<()> {
    let timestamp = cfg.timestamp.then(unix_time);
    line(out, &Record::Header { schema_version: SCHEMA_VERSION, tool_version: env!("CARGO_PKG_VERSION"), config: cfg, timestamp })?;
    for o in &res.outcomes {
        match &o.result {
            Ok(r) => line(out, &Record::Report { dim: o.dim, report: r })?,
            Err(e) => line(
                out,
                &Record::Error { case_id: &o.case_id, dim: o.dim, trial: o.trial, kind: error_kind(e), message: e.to_string() },
            )?,
        }
    }
    line(out, &Record::Summary { cases: &res.summaries, exit_code: res.exit_code })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    case_id: &'a str,
    dim: usize,
    trial: u64,
    holds: Option<bool>,
    asserted: Option<bool>,
    gap: Option<f64>,
    slack: Option<f64>,
    witness: Option<String>,
    error: Option<String>,
}

/// One row per trial.
pub fn write_csv<W: Write>(res: &RunResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for o in &res.outcomes {
        let row = match &o.result {
            Ok(r) => CsvRow {
                case_id: &o.case_id,
                dim: o.dim,
                trial: o.trial,
                holds: Some(r.holds),
                asserted: Some(r.asserted),
                gap: Some(r.gap),
                slack: Some(r.slack),
                witness: r.witness.as_ref().map(|w| format!("{:?}", w.kind)),
                error: None,
            },
            Err(e) => CsvRow {
                case_id: &o.case_id,
                dim: o.dim,
                trial: o.trial,
                holds: None,
                asserted: None,
                gap: None,
                slack: None,
                witness: None,
                error: Some(e.to_string()),
            },
        };
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |g| format!("{g:.3e}"))
}

/// Summary table.
pub fn write_text<W: Write>(res: &RunResult, out: &mut W) -> Result<()> {
    writeln!(
        out,
        "{:<12} {:>7} {:>7} {:>9} {:>6} {:>11} {:>11} {:>10}",
        "case", "trials", "held", "falsified", "errors", "min gap", "worst g/s", "witnesses"
    )?;
    for s in &res.summaries {
        let held = if s.asserted == 0 { "-".to_string() } else { s.held.to_string() };
        let falsified = if s.asserted == 0 { format!("({})", s.exploratory_failures) } else { s.falsified.to_string() };
        writeln!(
            out,
            "{:<12} {:>7} {:>7} {:>9} {:>6} {:>11} {:>11} {:>10}",
            s.case_id,
            s.trials,
            held,
            falsified,
            s.errors,
            fmt_opt(s.min_gap),
            fmt_opt(s.worst_severity),
            format!("{}/{}", s.witnesses_verified, s.witnesses)
        )?;
    }
    writeln!(out, "exit code {}", res.exit_code)?;
    Ok(())
}

pub fn write_output<W: Write>(cfg: &RunConfig, res: &RunResult, out: &mut W) -> Result<()> {
    match cfg.format {
        OutputFormat::Json => write_json(cfg, res, out),
        OutputFormat::Csv => write_csv(res, out),
        OutputFormat::Text => write_text(res, out),
    }
}
