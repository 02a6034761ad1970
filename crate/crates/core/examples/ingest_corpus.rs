//! Ingest the bundled demo corpus and print what was kept and dropped.
//!
//! ```bash
//! cargo run --example ingest_corpus
//! ```

use std::path::PathBuf;

use pubcareers::corpus::Corpus;
use pubcareers::AnalysisConfig;

fn main() -> pubcareers::Result<()> {
    let demo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let config = AnalysisConfig::load(&demo.join("config.toml"))?;
    let (corpus, report) = Corpus::ingest(config.corpus_path.as_deref().unwrap(), &config)?;

    println!("records read       {}", report.total);
    println!("kept               {}", report.kept);
    println!("wrong type         {}", report.dropped_document_type);
    println!("outside window     {}", report.dropped_year_window);
    println!("malformed          {}", report.malformed);

    let first = &corpus.records[0];
    println!(
        "\nfirst record {} ({}), {} authors:",
        first.pub_id,
        first.year,
        first.authors.len()
    );
    for a in &first.authors {
        println!(
            "  {:<4} {:<16} {:<10} {:?}",
            a.author_id, a.raw_first_name, a.raw_last_name, a.countries
        );
    }
    Ok(())
}
