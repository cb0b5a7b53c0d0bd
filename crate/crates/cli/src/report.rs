use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "leibniz-run-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// The classified statement the check targets.
    pub target: String,
    pub details: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, target: impl Into<String>, details: impl Into<String>) -> Self {
        Check { name: name.into(), status, target: target.into(), details: details.into() }
    }
}

/// Everything a run produced. Two runs with the same command and seed give
/// identical reports apart from `wall_time_ms`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    /// Present whenever the run drew random samples.
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub result: Value,
    pub wall_time_ms: u64,
    /// Human-readable body for text mode.
    #[serde(skip)]
    pub text: String,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: None,
            checks: Vec::new(),
            result: Value::Null,
            wall_time_ms: 0,
            text: String::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn render_text(&self) -> String {
        let mut out = self.text.clone();
        if !out.is_empty() && !out.ends_with('\n') {
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&format!("{:<12} {}", c.status.tag(), c.name));
            if !c.details.is_empty() {
                out.push_str(&format!(": {}", c.details));
            }
            out.push('\n');
        }
        if !self.checks.is_empty() {
            let pass = self.checks.iter().filter(|c| c.status == Status::Pass).count();
            out.push_str(&format!("{} checks: {pass} pass, {} fail\n", self.checks.len(), self.failed()));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed {s}\n"));
        }
        out
    }
}
