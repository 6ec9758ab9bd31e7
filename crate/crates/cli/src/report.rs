use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub input: Option<String>,
    pub radius: u64,
    pub period_cap: usize,
    pub depth: usize,
    pub t_max: u64,
    pub format: Format,
}

/// How a command ended, mapped onto the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Inconclusive,
    Violation,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 2,
            Status::Violation => 3,
        }
    }
}

/// What a command produced: the structured results plus a text rendering.
pub struct Report {
    pub command: &'static str,
    pub results: BTreeMap<&'static str, Value>,
    pub verdicts: BTreeMap<&'static str, bool>,
    pub status: Status,
    pub text: String,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            results: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            status: Status::Ok,
            text: String::new(),
        }
    }

    pub fn result(&mut self, key: &'static str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.insert(key, v);
    }

    /// Records a check; a failed one marks the run as a violation.
    pub fn check(&mut self, name: &'static str, passed: bool) {
        self.verdicts.insert(name, passed);
        if !passed {
            self.escalate(Status::Violation);
        }
    }

    /// Records an observation that does not affect the exit code.
    pub fn observe(&mut self, name: &'static str, value: bool) {
        self.verdicts.insert(name, value);
    }

    pub fn escalate(&mut self, status: Status) {
        self.status = self.status.max(status);
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.text.push_str(text.as_ref());
        self.text.push('\n');
    }

    pub fn render(&self, config: &Config) -> String {
        match config.format {
            Format::Structured => {
                let record = Record {
                    command: self.command,
                    config,
                    results: &self.results,
                    verdicts: &self.verdicts,
                };
                let mut out = serde_json::to_string_pretty(&record).expect("report serializes");
                out.push('\n');
                out
            }
            Format::Text => {
                let mut out = self.text.clone();
                if !self.verdicts.is_empty() {
                    out.push_str("verdicts:\n");
                    for (name, v) in &self.verdicts {
                        let _ = writeln!(out, "  {name}: {}", if *v { "yes" } else { "no" });
                    }
                }
                out
            }
        }
    }
}

#[derive(Serialize)]
struct Record<'a> {
    command: &'static str,
    config: &'a Config,
    results: &'a BTreeMap<&'static str, Value>,
    verdicts: &'a BTreeMap<&'static str, bool>,
}

/// Abbreviates long position lists for the text rendering.
pub fn brief(xs: &[i64], limit: usize) -> String {
    let shown: Vec<String> = xs.iter().take(limit).map(i64::to_string).collect();
    if xs.len() > limit {
        format!("[{}, ... ({} total)]", shown.join(", "), xs.len())
    } else {
        format!("[{}]", shown.join(", "))
    }
}
