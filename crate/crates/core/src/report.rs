//! Structured run reports shared by the command line and the acceptance harness.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::cascade::ClassificationResult;

/// A named result line; `passed` is set for checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

/// `{command, config, results[], residuals[], transcript[]}` plus the failing check names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub results: Vec<Entry>,
    pub residuals: Vec<String>,
    pub transcript: Vec<String>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn result(&mut self, name: impl ToString, value: impl ToString) -> &mut Self {
        self.results.push(Entry {
            name: name.to_string(),
            value: value.to_string(),
            passed: None,
        });
        self
    }

    pub fn check(&mut self, name: impl ToString, passed: bool, value: impl ToString) -> &mut Self {
        let name = name.to_string();
        if !passed {
            self.failures.push(name.clone());
        }
        self.results.push(Entry {
            name,
            value: value.to_string(),
            passed: Some(passed),
        });
        self
    }

    pub fn residual(&mut self, r: impl ToString) -> &mut Self {
        self.residuals.push(r.to_string());
        self
    }

    pub fn step(&mut self, line: impl ToString) -> &mut Self {
        self.transcript.push(line.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Adds a cascade result: transcript, status, multiplier and residual system.
    pub fn classification(&mut self, r: &ClassificationResult) -> &mut Self {
        for s in &r.steps {
            self.step(s);
        }
        self.result("path", &r.path);
        self.result("status", &r.status);
        self.result("multiplier", &r.multiplier);
        if let Some(st) = &r.stats {
            self.result("determining terms", format!("{} monomials, {} expanded", st.monomials, st.expanded_terms));
        }
        for a in &r.assumptions {
            self.result("assumed nonzero", a);
        }
        self.check("steps verified", r.all_verified(), r.steps.len());
        for e in &r.residual {
            self.residual(format!("{e} = 0"));
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== {}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(s, "  {k}: {v}");
        }
        if !self.transcript.is_empty() {
            let _ = writeln!(s, "-- transcript");
            for (i, t) in self.transcript.iter().enumerate() {
                let _ = writeln!(s, "{:>3}. {t}", i + 1);
            }
        }
        let _ = writeln!(s, "-- results");
        for e in &self.results {
            match e.passed {
                Some(true) => {
                    let _ = writeln!(s, "PASS {}: {}", e.name, e.value);
                }
                Some(false) => {
                    let _ = writeln!(s, "FAIL {}: {}", e.name, e.value);
                }
                None => {
                    let _ = writeln!(s, "  {}: {}", e.name, e.value);
                }
            }
        }
        if !self.residuals.is_empty() {
            let _ = writeln!(s, "-- residual system");
            for r in &self.residuals {
                let _ = writeln!(s, "  {r}");
            }
        }
        if !self.failures.is_empty() {
            let _ = writeln!(s, "-- failures: {}", self.failures.join(", "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_collected() {
        let mut r = Report::new("demo");
        r.config("order", 1).check("a", true, "0").check("b", false, "x");
        assert!(!r.passed());
        assert_eq!(r.failures, vec!["b".to_string()]);
        let text = r.to_text();
        assert!(text.contains("PASS a: 0") && text.contains("FAIL b: x"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["results"][1]["passed"], false);
        assert!(json["transcript"].as_array().unwrap().is_empty());
    }
}
