use std::fmt::Write as _;

use crate::config::Experiment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every double
            Cell::Real(v) => format!("{v:.16e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub criteria: Vec<Criterion>,
}

impl ExperimentReport {
    pub fn new(experiment: Experiment, header: Vec<&'static str>) -> Self {
        Self {
            experiment,
            header,
            rows: Vec::new(),
            criteria: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.criteria.push(Criterion {
            name: name.into(),
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Human-readable summary; `wall` is in seconds.
    pub fn summary(&self, wall: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", self.experiment.name());
        for c in &self.criteria {
            let _ = writeln!(out, "  {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        }
        let _ = write!(
            out,
            "result: {} ({} rows, {wall:.2}s)",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.rows.len()
        );
        out
    }
}
