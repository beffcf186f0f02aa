//! Runs a bundled experiment config through the whole pipeline and writes the CSV,
//! summary and SVG artifacts, as `hbgauge run` does.
//!
//! cargo run --release --example run_config -- crates/core/configs/ring_with_hole_p1.json

use std::path::PathBuf;

use hbgauge::config::ExperimentConfig;
use hbgauge::pipeline::execute;
use hbgauge::report::write_artifacts;

fn main() -> hbgauge::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/central_square_p1.json"));
    let config = ExperimentConfig::load(&path)?;
    let experiment = execute(&config)?;
    let files = write_artifacts(&experiment, &config.output.dir, config.output.svg)?;
    println!("{}", serde_json::to_string_pretty(&experiment.summary)?);
    println!("artifacts: {} {} and {} SVG files", files.csv.display(), files.summary.display(), files.svgs.len());
    Ok(())
}
