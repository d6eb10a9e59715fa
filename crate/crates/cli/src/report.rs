use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use globact::kstab::{Check, CheckStatus};

use crate::config::{CliError, Command, Common, Format};

pub const SCHEMA: &str = "globact-report/1";

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Undecided => 3,
            Status::Fail => 4,
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    command: &'a Command,
    #[serde(flatten)]
    common: &'a Common,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: Status,
    /// Human-readable summary lines.
    #[serde(skip)]
    pub lines: Vec<String>,
    pub result: Value,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(lines: Vec<String>, result: Value, checks: Vec<Check>) -> Self {
        let status = if checks.iter().all(Check::passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            status,
            lines,
            result,
            checks,
            elapsed: None,
        }
    }

    pub fn undecided(mut self) -> Self {
        self.status = Status::Undecided;
        self
    }

    pub fn render(&self, command: &Command, common: &Common) -> Result<String, CliError> {
        match common.format {
            Format::Json => {
                let mut doc = serde_json::json!({
                    "schema": SCHEMA,
                    "config": ConfigEcho { command, common },
                    "status": self.status,
                    "result": self.result,
                    "checks": self.checks,
                });
                if let Some(t) = self.elapsed {
                    doc["wall_time_ms"] = Value::from(t.as_millis() as u64);
                }
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
            Format::Text => {
                let mut out = String::new();
                for line in &self.lines {
                    writeln!(out, "{line}").expect("string write");
                }
                for c in &self.checks {
                    let tag = match c.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "FAIL",
                        CheckStatus::Skipped => "skip",
                    };
                    if c.detail.is_empty() {
                        writeln!(out, "[{tag}] {}", c.name).expect("string write");
                    } else {
                        writeln!(out, "[{tag}] {}: {}", c.name, c.detail).expect("string write");
                    }
                    for w in &c.witnesses {
                        writeln!(out, "       witness {w}").expect("string write");
                    }
                }
                let status = match self.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Undecided => "UNDECIDED",
                };
                writeln!(out, "status: {status}").expect("string write");
                if let Some(t) = self.elapsed {
                    writeln!(out, "wall time: {t:.2?}").expect("string write");
                }
                Ok(out)
            }
        }
    }

    pub fn emit(&self, command: &Command, common: &Common) -> Result<(), CliError> {
        let text = self.render(command, common)?;
        match &common.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}
