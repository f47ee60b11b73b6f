//! Verdicts, metrics and the summary files.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// value < limit
    Below,
    /// value <= limit
    AtMost,
    /// value >= limit
    AtLeast,
}

impl Bound {
    fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Bound::Below => value < limit,
            Bound::AtMost => value <= limit,
            Bound::AtLeast => value >= limit,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Bound::Below => "<",
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        }
    }
}

/// One pass/fail check, named after the invariant it tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub invariant: String,
    pub value: f64,
    pub bound: Bound,
    pub limit: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(invariant: &str, value: f64, bound: Bound, limit: f64) -> Self {
        Self {
            invariant: invariant.to_string(),
            value,
            bound,
            limit,
            pass: bound.holds(value, limit),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub verdicts: Vec<Verdict>,
    pub metrics: Vec<(String, f64)>,
    pub outputs: Vec<String>,
}

impl Summary {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            ..Self::default()
        }
    }

    pub fn verdict(&mut self, invariant: &str, value: f64, bound: Bound, limit: f64) {
        self.verdicts
            .push(Verdict::new(invariant, value, bound, limit));
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), value));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "scenario {}", self.scenario)?;
        for v in &self.verdicts {
            writeln!(
                w,
                "verdict {} {} value={:.6e} required {} {:.6e}",
                if v.pass { "PASS" } else { "FAIL" },
                v.invariant,
                v.value,
                v.bound.symbol(),
                v.limit
            )?;
        }
        for (name, value) in &self.metrics {
            writeln!(w, "metric {name} {value:.10e}")?;
        }
        for o in &self.outputs {
            writeln!(w, "output {o}")?;
        }
        writeln!(w, "result {}", if self.passed() { "PASS" } else { "FAIL" })
    }

    /// Writes `summary.txt` and the `summary.json` sidecar into `dir`.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        let mut text = Vec::new();
        self.write_text(&mut text)?;
        std::fs::write(dir.join("summary.txt"), text)?;
        let json = serde_json::to_string_pretty(&Json::from(self)).map_err(io::Error::other)?;
        std::fs::write(dir.join("summary.json"), json + "\n")
    }
}

#[derive(Serialize)]
struct Json<'a> {
    scenario: &'a str,
    pass: bool,
    verdicts: &'a [Verdict],
    metrics: serde_json::Map<String, serde_json::Value>,
    outputs: &'a [String],
}

impl<'a> From<&'a Summary> for Json<'a> {
    fn from(s: &'a Summary) -> Self {
        let metrics = s
            .metrics
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
                )
            })
            .collect();
        Json {
            scenario: &s.scenario,
            pass: s.passed(),
            verdicts: &s.verdicts,
            metrics,
            outputs: &s.outputs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Verdict::new("x", 1.0, Bound::AtMost, 1.0).pass);
        assert!(!Verdict::new("x", 1.0, Bound::Below, 1.0).pass);
        assert!(Verdict::new("x", 2.0, Bound::AtLeast, 1.8).pass);
        assert!(!Verdict::new("x", f64::NAN, Bound::AtLeast, 1.8).pass);
    }

    #[test]
    fn text_layout() {
        let mut s = Summary::new("tau-study");
        s.verdict("scaling_ode.first_integral", 1e-12, Bound::Below, 1e-8);
        s.metric("tau_end", 3.5);
        let mut buf = Vec::new();
        s.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(
            "verdict PASS scaling_ode.first_integral value=1.000000e-12 required < 1.000000e-8"
        ));
        assert!(text.ends_with("result PASS\n"));
    }
}
