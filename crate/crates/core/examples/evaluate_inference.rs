//! Accuracy of the inferred genders against the demo labels, laid out as
//! row counts with row percentages.
//!
//! ```bash
//! cargo run --example evaluate_inference
//! ```

use std::path::PathBuf;

use pubcareers::careers::{build_careers, compute_eligibility};
use pubcareers::corpus::{Classification, Corpus};
use pubcareers::gender::{infer_profiles, GenderLabel, LastNameTables};
use pubcareers::pipeline::load_providers;
use pubcareers::validation::{evaluate_inference, read_labels, ConfusionTable};
use pubcareers::AnalysisConfig;

fn main() -> pubcareers::Result<()> {
    let demo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let config = AnalysisConfig::load(&demo.join("config.toml"))?;
    let (corpus, _) = Corpus::ingest(config.corpus_path.as_deref().unwrap(), &config)?;
    let classification = Classification::read_csv(
        config.classification_path.as_deref().unwrap(),
        &config.disciplines,
    )?;
    let lastnames = LastNameTables::read_csv(config.lastname_path.as_deref().unwrap())?;
    let profiles = infer_profiles(&corpus, &load_providers(&config)?, &lastnames, &config);
    let (careers, _) = build_careers(&corpus, &profiles, &classification, &config);
    let eligibility = compute_eligibility(&careers, config.unknown_share);

    let labels = read_labels(config.labels_path.as_deref().unwrap())?;
    let table = evaluate_inference(&labels, &careers, &eligibility);
    println!("{table}\n");

    // the same layout on larger, illustrative counts
    let large = ConfusionTable {
        counts: [[986, 24], [9, 733], [98, 501]],
        uncovered: 0,
    };
    println!("{large}");
    println!(
        "\ninferred male, truly male: {}",
        large.cell(GenderLabel::Male, GenderLabel::Male)
    );
    Ok(())
}
