//! Output documents: one structure, rendered as long-format CSV or JSON.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{Row, VerificationReport};
use crate::spectral::ProblemParams;

use super::config::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ParamSummary {
    #[serde(rename = "N")]
    pub dim: usize,
    pub s: f64,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
}

impl ParamSummary {
    pub fn from_params(p: &ProblemParams) -> Self {
        ParamSummary {
            dim: p.dim(),
            s: p.order(),
            theta: Some(p.theta()),
            gamma: Some(p.gamma()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub rows: Vec<Row>,
}

/// Everything a command prints. Nothing run-dependent (timings, paths)
/// goes in, so identical configurations give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub schema: u32,
    pub command: String,
    pub params: ParamSummary,
    /// Seed of any randomized step; `None` when the command is deterministic
    /// without one.
    pub seed: Option<u64>,
    /// Aggregate verdict of the verification reports, if any.
    pub passed: Option<bool>,
    pub sections: Vec<Section>,
    pub reports: Vec<VerificationReport>,
}

impl Document {
    pub fn new(command: &str, params: ParamSummary) -> Self {
        Document {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            params,
            seed: None,
            passed: None,
            sections: Vec::new(),
            reports: Vec::new(),
        }
    }

    pub fn section(mut self, name: &str, rows: Vec<Row>) -> Self {
        self.sections.push(Section {
            name: name.to_string(),
            rows,
        });
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| Error::Domain(format!("json: {e}"))),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Result<String> {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:?}"));
        let mut head = String::new();
        head.push_str(&format!("# schema={}\n# command={}\n", self.schema, self.command));
        head.push_str(&format!(
            "# N={} s={} theta={} gamma={}\n",
            self.params.dim,
            self.params.s,
            opt(self.params.theta),
            opt(self.params.gamma)
        ));
        head.push_str(&format!("# seed={}\n", self.seed.map_or("none".to_string(), |s| s.to_string())));
        if let Some(p) = self.passed {
            head.push_str(&format!("# passed={p}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
        w.write_record(["section", "label", "name", "value", "error"]).map_err(csv_err)?;
        let mut rows = |section: &str, row: &Row| -> Result<()> {
            for c in &row.cells {
                w.write_record([section, &row.label, &c.name, &format!("{:?}", c.value), &format!("{:?}", c.error)])
                    .map_err(csv_err)?;
            }
            Ok(())
        };
        for s in &self.sections {
            for r in &s.rows {
                rows(&s.name, r)?;
            }
        }
        for rep in &self.reports {
            let summary = Row::new(format!("verdict={}", rep.verdict()))
                .exact("statistic", rep.statistic)
                .exact("threshold", rep.threshold);
            rows(&rep.check, &summary)?;
            for r in &rep.rows {
                rows(&rep.check, r)?;
            }
        }
        let body = w.into_inner().map_err(|e| Error::Domain(format!("csv: {e}")))?;
        Ok(head + &String::from_utf8(body).expect("csv output is utf-8"))
    }

    pub fn write(&self, format: Format, out: Option<&std::path::Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Domain(format!("stdout: {e}"))),
        }
    }
}
