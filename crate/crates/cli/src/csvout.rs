//! CSV emission: a `#` comment block, one column header, then rows in
//! 12-significant-digit scientific notation with `\n` line endings.

use std::fmt::Write as _;

use crate::config::{Resolved, SCHEMA_VERSION};

/// `{:.11e}` with negative zero folded to zero so reruns compare bytewise.
pub fn fmt_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

#[derive(Debug, Clone, Default)]
pub struct CsvDoc {
    comments: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl CsvDoc {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            comments: vec![format!("schema: {SCHEMA_VERSION}")],
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        let line = line.into();
        for l in line.lines() {
            self.comments.push(l.to_string());
        }
        self
    }

    /// Parameter echo for a resolved run; the `config:` line can be fed back
    /// through `--config`.
    pub fn echo(&mut self, command: &str, r: &Resolved) -> &mut Self {
        self.comment(format!("command: {command}"));
        self.comment(format!("drift: {}", tumorlevy::Drift::describe(&r.drift)));
        self.comment(format!(
            "noise: a={} epsilon={} alpha={}",
            r.noise.a, r.noise.epsilon, r.noise.alpha
        ));
        self.comment(format!(
            "grid: c={} d={} h={} interior_nodes={} scheme={}",
            r.grid.c(),
            r.grid.d(),
            r.grid.h(),
            r.grid.interior_len(),
            r.scheme
        ));
        // the destination is not part of the run
        let mut cfg = r.config.clone();
        cfg.output.path = None;
        self.comment(format!("config: {}", cfg.to_json_line()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Data rows of a rendered CSV, parsed back to numbers.
pub fn parse_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}
