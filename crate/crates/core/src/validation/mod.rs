//! Accuracy evaluation against labeled authors, and synthetic corpora with
//! known ground truth.

pub mod synth;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::careers::{AuthorCareer, EligibilitySet};
use crate::corpus::{csv_read_error, csv_write_error};
use crate::error::{Error, Result};
use crate::gender::GenderLabel;

pub use synth::{
    generate_corpus, CohortSize, GroupRates, NamePools, PlannedAuthor, SynthSpec, SyntheticDataset,
    Weighted,
};

/// A labeled author. Labels files are CSV with at least `author_id` and
/// `true_gender`; other columns are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub author_id: String,
    pub true_gender: GenderLabel,
}

pub fn read_labels(path: &Path) -> Result<Vec<Label>> {
    #[derive(Deserialize)]
    struct Row {
        author_id: String,
        true_gender: String,
    }
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_read_error(path, e))?;
    let mut labels = Vec::new();
    for (i, row) in r.deserialize::<Row>().enumerate() {
        let row = row?;
        let true_gender = match row.true_gender.to_ascii_lowercase().as_str() {
            "male" | "m" => GenderLabel::Male,
            "female" | "f" => GenderLabel::Female,
            other => {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    line: i + 2,
                    message: format!("true_gender must be male or female, got {other:?}"),
                })
            }
        };
        labels.push(Label {
            author_id: row.author_id,
            true_gender,
        });
    }
    Ok(labels)
}

pub fn write_labels(labels: &[Label], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_write_error(path, e))?;
    w.write_record(["author_id", "true_gender"])?;
    for l in labels {
        w.write_record([l.author_id.as_str(), l.true_gender.as_str()])?;
    }
    w.flush().map_err(|e| Error::write(path, e))
}

/// Inferred gender (rows: male, female, unknown) against true gender
/// (columns: male, female).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTable {
    pub counts: [[u64; 2]; 3],
    /// Labels for authors outside the analysed population.
    pub uncovered: u64,
}

const ROWS: [GenderLabel; 3] = [GenderLabel::Male, GenderLabel::Female, GenderLabel::Unknown];

fn row_index(g: GenderLabel) -> usize {
    match g.group() {
        GenderLabel::Male => 0,
        GenderLabel::Female => 1,
        _ => 2,
    }
}

impl ConfusionTable {
    pub fn add(&mut self, inferred: GenderLabel, truth: GenderLabel) {
        let col = match truth {
            GenderLabel::Male => 0,
            GenderLabel::Female => 1,
            _ => return,
        };
        self.counts[row_index(inferred)][col] += 1;
    }

    pub fn count(&self, inferred: GenderLabel, truth: GenderLabel) -> u64 {
        let col = if truth == GenderLabel::Female { 1 } else { 0 };
        self.counts[row_index(inferred)][col]
    }

    pub fn row_total(&self, inferred: GenderLabel) -> u64 {
        self.counts[row_index(inferred)].iter().sum()
    }

    pub fn scored(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Share of the inferred row with the given truth, in percent.
    pub fn row_percent(&self, inferred: GenderLabel, truth: GenderLabel) -> Option<f64> {
        let total = self.row_total(inferred);
        (total > 0).then(|| 100.0 * self.count(inferred, truth) as f64 / total as f64)
    }

    /// `"986 (97.6%)"`; the percentage is omitted for an empty row.
    pub fn cell(&self, inferred: GenderLabel, truth: GenderLabel) -> String {
        let n = self.count(inferred, truth);
        match self.row_percent(inferred, truth) {
            Some(p) => format!("{n} ({p:.1}%)"),
            None => n.to_string(),
        }
    }

    /// Male and female swapped in both labels and inferences.
    pub fn swapped(&self) -> ConfusionTable {
        let c = self.counts;
        ConfusionTable {
            counts: [[c[1][1], c[1][0]], [c[0][1], c[0][0]], [c[2][1], c[2][0]]],
            uncovered: self.uncovered,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_write_error(path, e))?;
        w.write_record([
            "inferred",
            "true_male",
            "true_male_pct",
            "true_female",
            "true_female_pct",
        ])?;
        let pct = |p: Option<f64>| p.map(|p| format!("{p:.1}")).unwrap_or_default();
        for g in ROWS {
            w.write_record([
                g.as_str().to_string(),
                self.count(g, GenderLabel::Male).to_string(),
                pct(self.row_percent(g, GenderLabel::Male)),
                self.count(g, GenderLabel::Female).to_string(),
                pct(self.row_percent(g, GenderLabel::Female)),
            ])?;
        }
        w.flush().map_err(|e| Error::write(path, e))
    }
}

impl std::fmt::Display for ConfusionTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<10}{:>16}{:>16}", "inferred", "male", "female")?;
        for g in ROWS {
            writeln!(
                f,
                "{:<10}{:>16}{:>16}",
                g.as_str(),
                self.cell(g, GenderLabel::Male),
                self.cell(g, GenderLabel::Female)
            )?;
        }
        write!(f, "uncovered labels: {}", self.uncovered)
    }
}

/// Scores labels against the inferred gender of analysed authors: those with
/// a career linked to an eligible country. Other labels count as uncovered.
pub fn evaluate_inference(
    labels: &[Label],
    careers: &[AuthorCareer],
    eligibility: &EligibilitySet,
) -> ConfusionTable {
    let analysed: HashMap<&str, GenderLabel> = careers
        .iter()
        .filter(|c| eligibility.covers(c))
        .map(|c| (c.author_id.as_str(), c.gender))
        .collect();
    let mut table = ConfusionTable::default();
    for label in labels {
        match analysed.get(label.author_id.as_str()) {
            Some(&g) => table.add(g, label.true_gender),
            None => table.uncovered += 1,
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::careers::CountryShare;
    use proptest::prelude::*;

    fn career(id: &str, gender: GenderLabel, country: &str) -> AuthorCareer {
        AuthorCareer {
            author_id: id.into(),
            first_year: 2000,
            last_year: 2002,
            per_year: vec![Default::default(); 3],
            disciplines: vec![],
            countries: vec![country.into()],
            gender,
        }
    }

    fn eligible(countries: &[(&str, bool)]) -> EligibilitySet {
        EligibilitySet {
            countries: countries
                .iter()
                .map(|&(c, e)| {
                    (
                        c.to_string(),
                        CountryShare {
                            share_unknown: 0.0,
                            eligible: e,
                        },
                    )
                })
                .collect(),
        }
    }

    fn label(id: &str, g: GenderLabel) -> Label {
        Label {
            author_id: id.into(),
            true_gender: g,
        }
    }

    #[test]
    fn row_percentages() {
        let mut t = ConfusionTable::default();
        t.counts[0] = [986, 24];
        assert_eq!(t.cell(GenderLabel::Male, GenderLabel::Male), "986 (97.6%)");
        assert_eq!(t.cell(GenderLabel::Male, GenderLabel::Female), "24 (2.4%)");
        assert_eq!(t.cell(GenderLabel::Unknown, GenderLabel::Male), "0");
    }

    #[test]
    fn scoring_and_coverage() {
        use GenderLabel::*;
        let careers = vec![
            career("a", Male, "US"),
            career("b", Female, "US"),
            career("c", NoInference, "US"),
            career("d", Male, "XX"),
        ];
        let elig = eligible(&[("US", true), ("XX", false)]);
        let labels = vec![
            label("a", Male),
            label("b", Male),
            label("c", Female),
            label("d", Male),
            label("zz", Female),
        ];
        let t = evaluate_inference(&labels, &careers, &elig);
        assert_eq!(t.counts, [[1, 0], [1, 0], [0, 1]]);
        assert_eq!(t.uncovered, 2);
    }

    #[test]
    fn all_unknown_and_perfect() {
        use GenderLabel::*;
        let elig = eligible(&[("US", true)]);
        let labels = vec![label("a", Male), label("b", Female)];
        let unknown = vec![career("a", Unknown, "US"), career("b", NoInference, "US")];
        let t = evaluate_inference(&labels, &unknown, &elig);
        assert_eq!(t.row_total(Unknown), 2);
        assert_eq!(t.scored(), 2);
        let perfect = vec![career("a", Male, "US"), career("b", Female, "US")];
        let t = evaluate_inference(&labels, &perfect, &elig);
        assert_eq!(t.counts, [[1, 0], [0, 1], [0, 0]]);
    }

    #[test]
    fn csv_round_trip_of_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(
            &path,
            "author_id,first_name,true_gender\na1,Ann,female\na2,Bo,M\n",
        )
        .unwrap();
        let labels = read_labels(&path).unwrap();
        assert_eq!(
            labels,
            vec![
                label("a1", GenderLabel::Female),
                label("a2", GenderLabel::Male)
            ]
        );
        std::fs::write(&path, "author_id,true_gender\na1,x\n").unwrap();
        assert!(read_labels(&path).is_err());
    }

    proptest! {
        #[test]
        fn relabeling_transposes(cases in proptest::collection::vec((0usize..4, any::<bool>()), 0..80)) {
            let kinds = [GenderLabel::Male, GenderLabel::Female, GenderLabel::Unknown, GenderLabel::NoInference];
            let elig = eligible(&[("US", true)]);
            let mut careers = Vec::new();
            let mut labels = Vec::new();
            let mut swapped_careers = Vec::new();
            let mut swapped_labels = Vec::new();
            for (i, (k, female)) in cases.iter().enumerate() {
                let id = format!("a{i}");
                let truth = if *female { GenderLabel::Female } else { GenderLabel::Male };
                careers.push(career(&id, kinds[*k], "US"));
                swapped_careers.push(career(&id, kinds[*k].swapped(), "US"));
                labels.push(label(&id, truth));
                swapped_labels.push(label(&id, truth.swapped()));
            }
            let t = evaluate_inference(&labels, &careers, &elig);
            let s = evaluate_inference(&swapped_labels, &swapped_careers, &elig);
            prop_assert_eq!(t.swapped(), s);
        }
    }
}
