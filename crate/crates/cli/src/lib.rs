//! Command implementations for the `mixcert` binary.
//!
//! Exit-code contract:
//! * `certify`    0 = ran to a verdict, 2 = bad config, 3 = runtime failure
//! * `identities` 0 = all identity families hold, 1 = a check failed, 2 = bad usage
//! * `axioms`     0 = all axioms hold, 1 = a violation was found, 2 = bad usage

pub mod axioms;
pub mod identities;
pub mod render;

use std::path::Path;

use mixcert_core::{build, run_pipeline, Error, ScenarioConfig};

pub fn run_certify(config_path: &Path, out_dir: &Path) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", config_path.display());
            return 2;
        }
    };
    let cfg = match ScenarioConfig::from_toml_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: malformed config {}: {e}", config_path.display());
            return 2;
        }
    };
    let scenario = match build(&cfg) {
        Ok(s) => s,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: scenario construction failed: {e}");
            return 3;
        }
    };
    let output = match run_pipeline(&scenario) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: certification failed: {e}");
            return 3;
        }
    };
    let (report, diagnostics) = (output.report, output.diagnostics);

    let files = [
        ("report.txt", render::report_text(&scenario.name, &report, &diagnostics)),
        ("spectrum.csv", render::spectrum_csv(&report)),
        ("dj_residuals.csv", render::dj_residuals_csv(&report)),
        ("decay.csv", render::decay_csv(&report)),
    ];
    for (file, content) in files {
        let path = out_dir.join(file);
        if let Err(e) = render::atomic_write(&path, &content) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 3;
        }
        println!("wrote {}", path.display());
    }
    println!("overall: {}", report.overall);
    0
}
