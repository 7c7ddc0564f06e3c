use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

/// One checked identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub citation: String,
    pub pass: bool,
    pub values: BTreeMap<String, Value>,
}

impl ResultRecord {
    pub fn new(id: impl Into<String>, citation: &str, pass: bool) -> Self {
        Self { id: id.into(), citation: citation.to_string(), pass, values: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), value.into());
        self
    }

    /// A failed record carrying an error message.
    pub fn error(id: impl Into<String>, citation: &str, err: impl std::fmt::Display) -> Self {
        Self::new(id, citation, false).with("error", err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub results: Vec<ResultRecord>,
    pub summary: Summary,
    pub version: String,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    id: String,
    citation: String,
    pass: bool,
    values: String,
}

impl RunReport {
    pub fn new(config: RunConfig, results: Vec<ResultRecord>, seconds: Option<f64>) -> Self {
        let pass = results.iter().filter(|r| r.pass).count();
        let fail = results.len() - pass;
        Self {
            config,
            results,
            summary: Summary { pass, fail, seconds },
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() { 0 } else { 1 }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.results {
            let values = serde_json::to_string(&r.values).expect("values serialize");
            w.serialize(CsvRow { id: r.id.clone(), citation: r.citation.clone(), pass: r.pass, values })
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Parses a CSV report back into records.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRecord>, csv::Error> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            let values = serde_json::from_str(&row.values).unwrap_or_default();
            Ok(ResultRecord { id: row.id, citation: row.citation, pass: row.pass, values })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, RunConfig};

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            ResultRecord::new("a/0", "x, y", true).with("sf", 2),
            ResultRecord::error("a/1", "z", "broke \"here\""),
        ];
        let rep = RunReport::new(RunConfig::defaults(Command::Otsf), recs.clone(), None);
        assert_eq!(parse_csv(&rep.to_csv()).unwrap(), recs);
        assert_eq!((rep.summary.pass, rep.summary.fail, rep.exit_code()), (1, 1, 1));
        assert!(rep.to_json().contains("\"seconds\": null"));
    }
}
