//! Careers, discipline and country links, and country eligibility.
//!
//! ```bash
//! cargo run --example build_careers
//! ```

use std::path::PathBuf;

use pubcareers::careers::{build_careers, compute_eligibility};
use pubcareers::corpus::{Classification, Corpus};
use pubcareers::gender::{infer_profiles, LastNameTables};
use pubcareers::pipeline::load_providers;
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

    let (careers, report) = build_careers(&corpus, &profiles, &classification, &config);
    println!("{} authors, {} careers\n", report.authors, report.careers);
    for c in &careers {
        let activity: Vec<String> = c.per_year.iter().map(|y| y.full.to_string()).collect();
        println!(
            "{:<4} {}-{} {:<8} [{}] disciplines={:?} countries={:?}",
            c.author_id,
            c.first_year,
            c.last_year,
            c.gender.as_str(),
            activity.join(" "),
            c.disciplines,
            c.countries
        );
    }

    let eligibility = compute_eligibility(&careers, config.unknown_share);
    println!("\ncountry  unknown share  eligible");
    for (country, share) in &eligibility.countries {
        println!(
            "{country:<8} {:>13.2}  {}",
            share.share_unknown, share.eligible
        );
    }
    Ok(())
}
