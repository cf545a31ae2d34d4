use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    pub fn eq<T: PartialEq + Display>(name: impl Into<String>, expected: T, actual: T) -> Check {
        Check { name: name.into(), pass: expected == actual, expected: expected.to_string(), actual: actual.to_string() }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), expected: "true".into(), actual: pass.to_string(), pass }
    }

    pub fn failed(name: impl Into<String>, why: impl Display) -> Check {
        Check { name: name.into(), expected: "ok".into(), actual: why.to_string(), pass: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: Value,
    pub checks: Vec<Check>,
    /// One-line rendering for human output; `None` prints the outputs.
    #[serde(skip)]
    pub summary: Option<String>,
}

impl Report {
    pub fn new(command: &str, outputs: Value) -> Report {
        Report { command: command.into(), inputs: BTreeMap::new(), outputs, checks: Vec::new(), summary: None }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Report {
        self.inputs.insert(key.into(), serde_json::to_value(value).expect("serializable input"));
        self
    }

    pub fn check(mut self, c: Check) -> Report {
        self.checks.push(c);
        self
    }

    pub fn checks(mut self, cs: impl IntoIterator<Item = Check>) -> Report {
        self.checks.extend(cs);
        self
    }

    pub fn summary(mut self, s: impl Into<String>) -> Report {
        self.summary = Some(s.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `--json` prints the outputs alone, with the checks folded in when
    /// there are any.
    pub fn render_json(&self) -> String {
        let mut out = self.outputs.clone();
        if !self.checks.is_empty() {
            if let Value::Object(map) = &mut out {
                map.insert("checks".into(), serde_json::to_value(&self.checks).expect("serializable checks"));
            }
        }
        serde_json::to_string(&out).expect("serializable outputs")
    }

    pub fn render_human(&self) -> String {
        let mut s = match &self.summary {
            Some(line) => line.clone(),
            None => serde_json::to_string_pretty(&self.outputs).expect("serializable outputs"),
        };
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            if c.pass {
                s.push_str(&format!("\n{tag} {}", c.name));
            } else {
                s.push_str(&format!("\n{tag} {} (expected {}, got {})", c.name, c.expected, c.actual));
            }
        }
        s
    }
}
