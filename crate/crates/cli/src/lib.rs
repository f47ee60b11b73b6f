//! Scenario runner for the `disperse` binary.

pub mod config;
pub mod scenarios;
pub mod summary;

use std::path::Path;

pub use config::{parse_config, ConfigError, Scenario, ScenarioConfig};
pub use scenarios::{run_scenario, RunError};
pub use summary::Summary;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VERDICT: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Parses, runs and reports; returns the process exit status.
pub fn execute(scenario: &str, config: &Path, out: Option<&Path>) -> u8 {
    let cfg = match scenario
        .parse::<Scenario>()
        .and_then(|s| parse_config(config, s))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let default_out = Path::new("out").join(cfg.scenario.name());
    let out = out.or(cfg.output.as_deref()).unwrap_or(&default_out);
    match run_scenario(&cfg, out) {
        Ok(summary) => {
            let mut text = Vec::new();
            if summary.write_text(&mut text).is_ok() {
                print!("{}", String::from_utf8_lossy(&text));
            }
            if summary.passed() {
                EXIT_PASS
            } else {
                EXIT_VERDICT
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
