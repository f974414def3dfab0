//! Check reports: human-readable verdict lines followed by a fenced
//! machine-readable block.
//!
//! Every command builds a [`Report`], pushes one line per check it ran, and
//! renders the whole thing once. The rendering ends with a fenced block
//! tagged `result` whose body is a single JSON object — scripts can scrape
//! the fence without parsing the prose above it. Exit-code policy: `0` when
//! every check passed, `1` when any failed; input errors never get as far
//! as a report and exit with `2`.

use serde_json::{json, Map, Value};

/// One verified statement inside a report.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Accumulated outcome of one command run.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    checks: Vec<Check>,
    extras: Map<String, Value>,
}

impl Report {
    /// Start a report; `command` is echoed back verbatim so a saved report
    /// identifies what produced it.
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            checks: Vec::new(),
            extras: Map::new(),
        }
    }

    /// Record one check line.
    pub fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Attach an extra key to the machine block (diagnostics, listings,
    /// derived quantities).
    pub fn note(&mut self, key: &str, value: Value) {
        self.extras.insert(key.into(), value);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// True when every recorded check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `0` iff all checks passed, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// The machine block as a JSON value.
    pub fn machine_block(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "passed": c.passed,
                    "detail": c.detail,
                })
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert(
            "verdict".into(),
            Value::String(if self.passed() { "pass" } else { "fail" }.into()),
        );
        obj.insert("checks".into(), Value::Array(checks));
        for (k, v) in &self.extras {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }

    /// Full rendering: command echo, one line per check, a verdict line,
    /// and the fenced machine block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.command);
        out.push('\n');
        let width = self
            .checks
            .iter()
            .map(|c| c.label.len())
            .max()
            .unwrap_or(0);
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark}  {:width$}  {}\n", c.label, c.detail));
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "verdict: {} ({passed}/{} checks)\n",
            if self.passed() { "pass" } else { "fail" },
            self.checks.len()
        ));
        out.push_str("```result\n");
        out.push_str(
            &serde_json::to_string_pretty(&self.machine_block())
                .expect("reports serialize to JSON"),
        );
        out.push_str("\n```\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_checks() {
        let mut r = Report::new("cpstar verify x.alg");
        r.push("frobenius-law", true, "deviation 0");
        assert_eq!(r.exit_code(), 0);
        r.push("positivity", false, "min eigenvalue -1");
        assert_eq!(r.exit_code(), 1);
        assert!(!r.passed());
    }

    #[test]
    fn machine_block_is_valid_json_inside_the_fence() {
        let mut r = Report::new("cpstar check-cp t.mor");
        r.push("complete-positivity", false, "min rearrangement eigenvalue -1");
        r.note("min_eigenvalue", json!(-1.0));
        let rendered = r.render();
        let fence_start = rendered.find("```result\n").expect("fence present");
        let body = &rendered[fence_start + "```result\n".len()..];
        let fence_end = body.find("\n```").expect("fence closed");
        let parsed: Value = serde_json::from_str(&body[..fence_end]).unwrap();
        assert_eq!(parsed["verdict"], "fail");
        assert_eq!(parsed["min_eigenvalue"], -1.0);
        assert_eq!(parsed["command"], "cpstar check-cp t.mor");
        assert_eq!(parsed["checks"][0]["passed"], false);
    }

    #[test]
    fn rendering_lists_every_check_line() {
        let mut r = Report::new("cpstar classify a.alg");
        r.push("wedderburn", true, "factors [1, 2]");
        r.push("normaliser", true, "matches blockwise formula");
        let rendered = r.render();
        assert!(rendered.contains("ok    wedderburn"));
        assert!(rendered.contains("factors [1, 2]"));
        assert!(rendered.contains("verdict: pass (2/2 checks)"));
    }
}
