//! Report envelope shared by every subcommand, rendered as JSON or CSV.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// A property that must hold exactly; failure is an assertion failure.
    Exact,
    /// A bounded-ratio or numerical observation.
    Empirical,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn exact(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Exact, holds, detail: detail.into() }
    }

    pub fn empirical(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind: CheckKind::Empirical, holds, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    AssertionFailed,
    BudgetExceeded,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvalidInput => 1,
            Status::AssertionFailed => 2,
            Status::BudgetExceeded => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::Budget { .. } => "budget",
            Error::Size(_) => "size",
            Error::Mismatch(_) => "mismatch",
            Error::Contract(_) => "contract",
            Error::Singular => "singular",
            Error::Overflow(_) => "overflow",
            Error::Consistency(_) => "consistency",
        };
        ErrorRecord { kind, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub status: Status,
    pub checks: Vec<Check>,
    pub error: Option<ErrorRecord>,
    pub columns: Vec<String>,
    pub rows: Vec<Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, columns: &[&str]) -> Self {
        Report {
            tool: "commutant",
            version: crate::VERSION,
            command: command.to_string(),
            config,
            status: Status::Ok,
            checks: Vec::new(),
            error: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<T: Serialize>(&mut self, row: &T) {
        self.rows.push(serde_json::to_value(row).expect("report rows serialize"));
    }

    pub fn check(&mut self, check: Check) {
        if check.kind == CheckKind::Exact && !check.holds && self.status == Status::Ok {
            self.status = Status::AssertionFailed;
        }
        self.checks.push(check);
    }

    pub fn fail(&mut self, e: &Error) {
        self.status = match e {
            Error::Budget { .. } => Status::BudgetExceeded,
            Error::Consistency(_) => Status::AssertionFailed,
            _ => Status::InvalidInput,
        };
        self.error = Some(e.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Comment header (`# key: value`), then one CSV record per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# tool: {}", self.tool)?;
        writeln!(out, "# version: {}", self.version)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config: {}", self.config)?;
        writeln!(out, "# status: {}", serde_json::to_value(self.status).unwrap().as_str().unwrap())?;
        for c in &self.checks {
            let kind = serde_json::to_value(c.kind).unwrap();
            writeln!(
                out,
                "# check: {} [{}] {} {}",
                c.name,
                kind.as_str().unwrap(),
                if c.holds { "pass" } else { "fail" },
                c.detail
            )?;
        }
        if let Some(e) = &self.error {
            writeln!(out, "# error: {} {}", e.kind, e.message)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(self.columns.iter().map(|c| cell(row.get(c))))?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("report is UTF-8")
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|i| cell(Some(i)))
            .collect::<Vec<_>>()
            .join(" "),
        Some(other) => other.to_string(),
    }
}
