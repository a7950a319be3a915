//! Command-line plumbing shared by the `nadiff` binary and the acceptance tests: run
//! configuration, verification suites, JSON-lines reports and the `compute` subcommands.

pub mod compute;
pub mod fnspec;
mod suites;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ultrametric::is_prime;

pub use suites::run_one;

pub const MAX_PRECISION: i64 = 256;
pub const MAX_TRUNCATION: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Stirling,
    Mahler,
    Leibniz,
    Functoriality,
    Witness,
    Invert,
    Obstruction,
    Eta,
    Loops,
    Commutators,
    Valuation,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Stirling,
        Suite::Mahler,
        Suite::Leibniz,
        Suite::Functoriality,
        Suite::Witness,
        Suite::Invert,
        Suite::Obstruction,
        Suite::Eta,
        Suite::Loops,
        Suite::Commutators,
        Suite::Valuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stirling => "stirling",
            Suite::Mahler => "mahler",
            Suite::Leibniz => "leibniz",
            Suite::Functoriality => "functoriality",
            Suite::Witness => "witness",
            Suite::Invert => "invert",
            Suite::Obstruction => "obstruction",
            Suite::Eta => "eta",
            Suite::Loops => "loops",
            Suite::Commutators => "commutators",
            Suite::Valuation => "valuation",
        }
    }

    /// Position in [`Suite::ALL`], starting at 1; prefixes record ids.
    pub fn number(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    /// Comma-separated names, `all` or `none`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "all" => out.extend(Suite::ALL),
                "none" => {}
                _ => out.push(
                    *Suite::ALL
                        .iter()
                        .find(|s| s.name() == name)
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{name}'")))?,
                ),
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Polynomials (integer coefficients, constant term first) added to the Mahler round trip.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub polys: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub p: u32,
    pub u: u32,
    pub precision: i64,
    pub truncation: usize,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub out: Option<PathBuf>,
    pub fixtures: Option<PathBuf>,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { p: 2, u: 1, precision: 32, truncation: 8, seed: 0, suites: Vec::new(), out: None, fixtures: None, timing: true }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p as u64) {
            return Err(Error::InvalidArgument(format!("{} is not prime", self.p)));
        }
        if self.u == 0 || (self.p as u64).pow(self.u) > 1 << 16 {
            return Err(Error::InvalidArgument(format!("extension degree {} out of range", self.u)));
        }
        if !(1..=MAX_PRECISION).contains(&self.precision) {
            return Err(Error::BoundExceeded(format!("precision {} outside 1..={MAX_PRECISION}", self.precision)));
        }
        if self.truncation > MAX_TRUNCATION {
            return Err(Error::BoundExceeded(format!("truncation {} > {MAX_TRUNCATION}", self.truncation)));
        }
        Ok(())
    }

    pub fn load_fixtures(&self) -> Result<FixtureFile> {
        let Some(path) = &self.fixtures else { return Ok(FixtureFile::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let file: FixtureFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { pos: e.column(), msg: format!("{}: line {}: {e}", path.display(), e.line()) })?;
        if let Some(p) = file.polys.iter().find(|p| p.is_empty() || p.len() > 33) {
            return Err(Error::InvalidArgument(format!("fixture polynomial {p:?} must have 1..=33 coefficients")));
        }
        Ok(file)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub module: &'static str,
    pub operation: &'static str,
    pub inputs: String,
    pub inputs_digest: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

/// FNV-1a, stable across platforms and toolchains.
pub fn digest(s: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Runs one check, timing it and turning an error into a failed record.
pub(crate) fn record(
    suite: Suite,
    key: String,
    module: &'static str,
    operation: &'static str,
    inputs: String,
    check: impl FnOnce() -> Result<(bool, Option<i64>, Option<String>)>,
) -> CheckRecord {
    let start = Instant::now();
    let (pass, margin, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, None, Some(e.to_string())),
    };
    CheckRecord {
        id: format!("{:02}-{}/{key}", suite.number(), suite.name()),
        module,
        operation,
        inputs_digest: digest(&inputs),
        inputs,
        status: if pass { Status::Pass } else { Status::Fail },
        margin,
        detail,
        elapsed_us: Some(start.elapsed().as_micros() as u64),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub suites: Vec<SuiteSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    fn assemble(mut records: Vec<CheckRecord>, suites: &[Suite]) -> Report {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let count =
            |rs: &mut dyn Iterator<Item = &CheckRecord>| rs.fold((0, 0), |(t, p), r| (t + 1, p + (r.status == Status::Pass) as usize));
        let per_suite = suites
            .iter()
            .map(|&s| {
                let prefix = format!("{:02}-{}/", s.number(), s.name());
                let (total, passed) = count(&mut records.iter().filter(|r| r.id.starts_with(&prefix)));
                SuiteSummary { suite: s, total, passed, failed: total - passed }
            })
            .collect();
        let (total, passed) = count(&mut records.iter());
        Report { records, summary: Summary { total, passed, failed: total - passed, suites: per_suite } }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn suite_passed(&self, suite: Suite) -> bool {
        self.summary.suites.iter().any(|s| s.suite == suite && s.failed == 0 && s.total > 0)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    /// One JSON object per record followed by the summary.
    pub fn to_json_lines(&self, timing: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            let r = if timing { r.clone() } else { CheckRecord { elapsed_us: None, ..r.clone() } };
            out.push_str(&serde_json::to_string(&r).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&serde_json::json!({ "summary": self.summary })).expect("serializable"));
        out.push('\n');
        out
    }
}

/// Runs the selected suites concurrently and assembles a report sorted by check id.
pub fn run_suite(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let fixtures = config.load_fixtures()?;
    let records = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .suites
            .iter()
            .map(|&s| {
                let fixtures = &fixtures;
                scope.spawn(move || run_one(s, config, fixtures))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect::<Vec<_>>()
    });
    Ok(Report::assemble(records, &config.suites))
}
