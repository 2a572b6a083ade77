//! Machine-readable reports for the CLI. Rendering is byte-deterministic:
//! field order is fixed by the struct, nested objects are sorted maps, and
//! every scalar is an exact rational rendered as an integer or "p/q".

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub command: String,
    pub model: String,
    /// "pass" when every check passed, "fail" when one did not, "error"
    /// when the input could not be processed at all
    pub status: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, model: &str) -> Report {
        Report {
            command: command.into(),
            model: model.into(),
            status: "pass".into(),
            checks: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
        });
        if !pass {
            self.status = "fail".into();
        }
    }

    pub fn error(command: &str, model: &str, message: &str) -> Report {
        Report {
            command: command.into(),
            model: model.into(),
            status: "error".into(),
            checks: vec![Check {
                name: "load".into(),
                pass: false,
                detail: Some(message.into()),
            }],
            data: Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn set_data(&mut self, data: Value) {
        self.data = data;
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports are plain data");
        out.push('\n');
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("courant {} :: {}\n", self.command, self.model));
        for c in &self.checks {
            let verdict = if c.pass { "pass" } else { "FAIL" };
            match &c.detail {
                Some(d) => out.push_str(&format!("  {:<40} {}  ({})\n", c.name, verdict, d)),
                None => out.push_str(&format!("  {:<40} {}\n", c.name, verdict)),
            }
        }
        if !self.data.is_null() {
            out.push_str(&render_value("  ", &self.data));
        }
        out.push_str(&format!("status: {}\n", self.status));
        out
    }

    /// One line for standard error.
    pub fn summary_line(&self) -> String {
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        format!(
            "courant {}: {} ({} checks, {} failed) :: {}",
            self.command,
            self.status,
            self.checks.len(),
            failed,
            self.model
        )
    }
}

fn render_value(indent: &str, v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{indent}{k}:\n"));
                        out.push_str(&render_value(&format!("{indent}  "), v));
                    }
                    _ => out.push_str(&format!("{indent}{k}: {}\n", plain(v))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{indent}-\n"));
                        out.push_str(&render_value(&format!("{indent}  "), item));
                    }
                    _ => out.push_str(&format!("{indent}- {}\n", plain(item))),
                }
            }
        }
        _ => out.push_str(&format!("{indent}{}\n", plain(v))),
    }
    out
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn failing_check_flips_the_status() {
        let mut r = Report::new("validate", "m");
        r.check("a", true, None);
        assert!(r.passed());
        r.check("b", false, Some("residual 1/2".into()));
        assert!(!r.passed());
        assert_eq!(r.status, "fail");
    }

    #[test]
    fn json_rendering_is_deterministic() {
        let mut r = Report::new("sequence", "su2");
        r.check("exact", true, None);
        r.set_data(json!({"dims": [10, 18, 9, 1], "zeta": "1/3", "alpha": 2}));
        let a = r.render_json();
        let b = r.render_json();
        assert_eq!(a, b);
        // sorted object keys inside data
        let alpha = a.find("\"alpha\"").unwrap();
        let zeta = a.find("\"zeta\"").unwrap();
        assert!(alpha < zeta);
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn text_rendering_lists_checks_and_data() {
        let mut r = Report::new("ce", "su2");
        r.check("betti", true, Some("1,0,0,1".into()));
        r.set_data(json!({"betti": [1, 0, 0, 1]}));
        let t = r.render_text();
        assert!(t.contains("courant ce :: su2"));
        assert!(t.contains("pass"));
        assert!(t.contains("- 1"));
        assert!(t.trim_end().ends_with("status: pass"));
    }
}
