//! Plant a productivity and a gap effect in a synthetic corpus, run the
//! pipeline and compare the estimates with the generator's ground truth.
//!
//! ```bash
//! cargo run --release --example synthetic_recovery
//! ```

use pubcareers::careers::{build_careers, compute_eligibility};
use pubcareers::gender::{infer_profiles, GenderLabel};
use pubcareers::stats::{compute_figures, CohortRow};
use pubcareers::validation::{generate_corpus, SynthSpec};

fn value(rows: &[CohortRow], stat: &str, cohort: i32, gender: GenderLabel, year: u32) -> f64 {
    rows.iter()
        .find(|r| {
            r.statistic == stat
                && r.cohort == Some(cohort)
                && r.gender == Some(gender)
                && r.career_year == Some(year)
        })
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

fn main() -> pubcareers::Result<()> {
    let mut spec = SynthSpec::default();
    spec.female.productivity = 2.0;
    spec.male.productivity = 2.0 * 1.18;
    spec.male.gap = 0.20;
    spec.female.gap = 0.20 * 1.05;
    let data = generate_corpus(&spec)?;
    let config = data.config();
    let corpus = data.corpus();
    let profiles = infer_profiles(&corpus, &data.providers(), &data.lastname_tables(), &config);
    let (careers, _) = build_careers(&corpus, &profiles, &data.classification, &config);
    let eligibility = compute_eligibility(&careers, config.unknown_share);
    let (tables, _) = compute_figures(&careers, &eligibility, &config);
    let fig = |id: &str| &tables.iter().find(|t| t.id == id).unwrap().rows;

    println!(
        "{:<26}{:>7}{:>10}{:>20}",
        "statistic", "cohort", "estimate", "expected (3σ)"
    );
    for truth in data
        .ground_truth
        .iter()
        .filter(|r| r.career_year == Some(config.snapshot_year) || r.career_year == Some(10))
    {
        let (estimate, name) = match truth.statistic.as_str() {
            "productivity_full_ratio" if truth.career_year == Some(config.snapshot_year) => {
                let y = config.snapshot_year;
                let c = truth.cohort.unwrap();
                let rows = fig("fig06");
                let m = value(rows, "productivity_full", c, GenderLabel::Male, y);
                (
                    m / value(rows, "productivity_full", c, GenderLabel::Female, y),
                    "male/female productivity",
                )
            }
            "gap_len_1_ratio" if truth.career_year == Some(10) => {
                let c = truth.cohort.unwrap();
                let rows = fig("figB1");
                let f = value(rows, "gap_len_1", c, GenderLabel::Female, 10);
                (
                    f / value(rows, "gap_len_1", c, GenderLabel::Male, 10),
                    "female/male one-year gaps",
                )
            }
            _ => continue,
        };
        if estimate.is_nan() {
            continue;
        }
        let (lo, hi) = (truth.ci_lo.unwrap(), truth.ci_hi.unwrap());
        let verdict = if (lo..=hi).contains(&estimate) {
            "ok"
        } else {
            "OUTSIDE"
        };
        println!(
            "{:<26}{:>7}{:>10.3}{:>9.3} [{:.3}, {:.3}] {verdict}",
            name,
            truth.cohort.unwrap(),
            estimate,
            truth.value,
            lo,
            hi
        );
    }
    Ok(())
}
