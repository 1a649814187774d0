//! Deterministic command reports, rendered as aligned text or JSON.
//!
//! The JSON shape is described by `docs/report.schema.json`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        InputDigest {
            name: name.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub value: String,
    pub pass: bool,
    /// A reported quantity rather than a check; always passes.
    #[serde(default, skip_serializing_if = "is_false")]
    pub info: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        header: impl IntoIterator<Item = S>,
    ) -> Self {
        Table {
            name: name.into(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    fn render(&self, out: &mut String) {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = (0..cols)
                .map(|k| {
                    let cell = cells.get(k).map(String::as_str).unwrap_or("");
                    let pad = widths[k] - cell.chars().count();
                    format!("{}{}", " ".repeat(pad), cell)
                })
                .collect();
            padded.join("  ")
        };
        let _ = writeln!(out, "table {} ({} rows)", self.name, self.rows.len());
        let _ = writeln!(out, "  {}", line(&self.header));
        for row in &self.rows {
            let _ = writeln!(out, "  {}", line(row));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub findings: Vec<Finding>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            inputs: Vec::new(),
            findings: Vec::new(),
            tables: Vec::new(),
            generated_at_unix: None,
        }
    }

    pub fn input(&mut self, digest: InputDigest) {
        self.inputs.push(digest);
    }

    /// A check that can fail.
    pub fn check(&mut self, name: impl Into<String>, value: impl ToString, pass: bool) {
        self.findings.push(Finding {
            name: name.into(),
            value: value.to_string(),
            pass,
            info: false,
        });
    }

    /// A reported quantity with nothing to fail.
    pub fn note(&mut self, name: impl Into<String>, value: impl ToString) {
        self.findings.push(Finding {
            name: name.into(),
            value: value.to_string(),
            pass: true,
            info: true,
        });
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qontext {}", self.command);
        if let Some(t) = self.generated_at_unix {
            let _ = writeln!(out, "generated_at_unix {t}");
        }
        for i in &self.inputs {
            let _ = writeln!(out, "input {} sha256:{}", i.name, i.sha256);
        }
        for f in &self.findings {
            let tag = match (f.info, f.pass) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = writeln!(out, "[{tag}] {} = {}", f.name, f.value);
        }
        for t in &self.tables {
            t.render(&mut out);
        }
        let _ = writeln!(
            out,
            "result {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
