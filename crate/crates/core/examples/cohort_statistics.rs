//! Cohort statistics on hand-made careers: the attrition hazard, productivity
//! and the one-year-gap count, then the full table set on a synthetic corpus.
//!
//! ```bash
//! cargo run --release --example cohort_statistics
//! ```

use pubcareers::careers::{build_careers, compute_eligibility, AuthorCareer, YearCounts};
use pubcareers::gender::{infer_profiles, GenderLabel};
use pubcareers::stats::{
    attrition_hazard, career_gaps, compute_figures, mean_productivity, Counting,
};
use pubcareers::validation::{generate_corpus, SynthSpec};

fn career(id: usize, start: i32, counts: &[u32]) -> AuthorCareer {
    AuthorCareer {
        author_id: format!("c{id}"),
        first_year: start,
        last_year: start + counts.len() as i32 - 1,
        per_year: counts
            .iter()
            .map(|&n| YearCounts {
                full: n,
                fractional: n as f64 / 3.0,
                ..Default::default()
            })
            .collect(),
        disciplines: vec![],
        countries: vec![],
        gender: GenderLabel::Female,
    }
}

fn main() -> pubcareers::Result<()> {
    // 120,366 still active after five years, 114,753 after six
    let mut careers: Vec<AuthorCareer> = (0..5_613).map(|i| career(i, 2000, &[1; 6])).collect();
    careers.extend((0..114_753).map(|i| career(10_000 + i, 2000, &[1; 7])));
    let refs: Vec<&AuthorCareer> = careers.iter().collect();
    let (hazard, active) = attrition_hazard(&refs, 2000, 5).unwrap();
    println!("hazard after 5 years: {:.1}% of {active}", hazard * 100.0);

    let small = [
        career(0, 2005, &[2, 0, 1, 3, 0, 0, 1]),
        career(1, 2005, &[1, 1, 0, 1, 2]),
    ];
    let small: Vec<&AuthorCareer> = small.iter().collect();
    let (mean, n) = mean_productivity(&small, 4, Counting::Full).unwrap();
    println!("year-4 productivity: {mean} over {n} careers");
    let (gaps, n) = career_gaps(&small, 5).unwrap();
    println!("gaps per career in the first 5 years (n={n}): {gaps:?}");

    // every table, on a small synthetic corpus
    let data = generate_corpus(&SynthSpec::default().scaled(0.2))?;
    let config = data.config();
    let corpus = data.corpus();
    let profiles = infer_profiles(&corpus, &data.providers(), &data.lastname_tables(), &config);
    let (careers, _) = build_careers(&corpus, &profiles, &data.classification, &config);
    let eligibility = compute_eligibility(&careers, config.unknown_share);
    let (tables, meta) = compute_figures(&careers, &eligibility, &config);
    println!(
        "\n{} careers, {} in the general population",
        meta.careers, meta.general_population
    );
    for t in &tables {
        println!("{}: {} rows", t.id, t.rows.len());
    }
    let fig04 = tables.iter().find(|t| t.id == "fig04").unwrap();
    for row in fig04
        .rows
        .iter()
        .filter(|r| r.cohort == Some(2000) && r.career_year == Some(5))
    {
        println!(
            "  2000 cohort, {:?}: hazard(5) = {:.3} (n={})",
            row.gender.unwrap(),
            row.value,
            row.n
        );
    }
    Ok(())
}
