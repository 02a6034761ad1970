//! Every stage on the demo fixture, writing a run directory, as the
//! `pubcareers all` command does.
//!
//! ```bash
//! cargo run --example full_pipeline -- /tmp/demo-run
//! ```

use std::path::PathBuf;

use pubcareers::pipeline::{self, Stage};
use pubcareers::AnalysisConfig;

fn main() -> pubcareers::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pubcareers-demo"));
    let demo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let config = AnalysisConfig::load(&demo.join("config.toml"))?;

    for stage in [
        Stage::Ingest,
        Stage::InferGender,
        Stage::BuildCareers,
        Stage::Stats,
        Stage::Evaluate,
    ] {
        pipeline::run(stage, &config, &out)?;
        println!("{stage:>14} done");
    }
    let mut files: Vec<_> = std::fs::read_dir(&out)
        .map_err(|e| pubcareers::Error::Config(e.to_string()))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("\n{}:", out.display());
    for f in files {
        println!("  {f}");
    }
    println!(
        "\n{}",
        std::fs::read_to_string(out.join(pipeline::CONFUSION)).unwrap_or_default()
    );
    Ok(())
}
