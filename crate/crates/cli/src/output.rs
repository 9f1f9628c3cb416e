//! Reports and their JSON, TSV and human-readable renderings.

use serde_json::{json, Value};

use superlin::report::{Check, Report};

/// Machine-readable output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutFormat {
    Json,
    Tsv,
}

/// Result of one command: named checks, structured data and a table.
pub struct Outcome {
    pub command: &'static str,
    checks: Vec<Check>,
    pub data: Value,
    /// Rows of the data table; the first row is the header.
    pub table: Vec<Vec<String>>,
    /// Lines shown only in the human-readable rendering.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(command: &'static str) -> Outcome {
        Outcome { command, checks: Vec::new(), data: Value::Null, table: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Adds the checks of a library report, prefixing their names.
    pub fn report(&mut self, prefix: &str, r: Report) {
        for c in r.checks {
            let name = if prefix.is_empty() { c.name } else { format!("{prefix}.{}", c.name) };
            self.checks.push(Check { name, ..c });
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn sorted(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = self.checks.iter().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    pub fn render(&self, format: OutFormat) -> String {
        match format {
            OutFormat::Json => {
                let checks: Vec<Value> = self.sorted().iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect();
                let v = json!({"command": self.command, "passed": self.passed(), "checks": checks, "data": self.data});
                let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
                s.push('\n');
                s
            }
            OutFormat::Tsv => {
                let mut s = String::new();
                for c in self.sorted() {
                    s.push_str(&format!("check\t{}\t{}\t{}\n", c.name, if c.passed { "pass" } else { "fail" }, clean(&c.detail)));
                }
                for row in &self.table {
                    s.push_str(&row.iter().map(|x| clean(x)).collect::<Vec<_>>().join("\t"));
                    s.push('\n');
                }
                s
            }
        }
    }

    /// Aligned tables of checks and data for a terminal.
    pub fn human(&self) -> String {
        let mut rows = vec![vec!["check".to_string(), "status".into(), "detail".into()]];
        for c in self.sorted() {
            rows.push(vec![c.name.clone(), if c.passed { "PASS" } else { "FAIL" }.into(), c.detail.clone()]);
        }
        let mut s = format!("{}: {}\n", self.command, if self.passed() { "all checks pass" } else { "CHECK FAILED" });
        s.push_str(&align(&rows));
        if !self.table.is_empty() {
            s.push('\n');
            s.push_str(&align(&self.table));
        }
        for n in &self.notes {
            s.push_str(n);
            s.push('\n');
        }
        s
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|x| x.chars().count()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, x)| if i + 1 == r.len() { x.clone() } else { format!("{x:<w$}", w = widths[i]) })
            .collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_are_sorted_by_name() {
        let mut o = Outcome::new("t");
        o.check("zeta", true, "ok");
        o.check("alpha", false, "bad\tvalue");
        let tsv = o.render(OutFormat::Tsv);
        assert_eq!(tsv, "check\talpha\tfail\tbad value\ncheck\tzeta\tpass\tok\n");
        assert!(!o.passed());
    }

    #[test]
    fn columns_align() {
        let t = align(&[vec!["a".into(), "bb".into()], vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}
