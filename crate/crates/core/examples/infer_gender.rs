//! Gender inference on the demo corpus, showing which step decided each author.
//!
//! ```bash
//! cargo run --example infer_gender
//! ```

use std::path::PathBuf;

use pubcareers::corpus::Corpus;
use pubcareers::gender::{infer_profiles, LastNameTables};
use pubcareers::pipeline::load_providers;
use pubcareers::AnalysisConfig;

fn main() -> pubcareers::Result<()> {
    let demo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let config = AnalysisConfig::load(&demo.join("config.toml"))?;
    let (corpus, _) = Corpus::ingest(config.corpus_path.as_deref().unwrap(), &config)?;
    let providers = load_providers(&config)?;
    let lastnames = LastNameTables::read_csv(config.lastname_path.as_deref().unwrap())?;

    let profiles = infer_profiles(&corpus, &providers, &lastnames, &config);
    println!(
        "{:<5}{:<16}{:<12}{:<24}{:<14}provenance",
        "id", "first name", "last name", "candidates", "gender"
    );
    for p in &profiles {
        println!(
            "{:<5}{:<16}{:<12}{:<24}{:<14}{:?}",
            p.author_id,
            p.first_name,
            p.last_name,
            p.candidates.join(","),
            p.gender.as_str(),
            p.provenance
        );
    }
    Ok(())
}
