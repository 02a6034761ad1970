//! Author careers, discipline and country links, and country eligibility.
//!
//! A career spans the calendar years from an author's first to last counted
//! publication. Career year `Y` is 1-based: `Y = 1` is the first year and the
//! career length counts years inclusively, so a career whose first and last
//! year coincide has length 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::corpus::{csv_read_error, csv_write_error, Classification, Corpus, PublicationRecord};
use crate::error::{Error, Result};
use crate::gender::{AuthorProfile, GenderLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Single,
    First,
    Last,
    Middle,
}

impl Position {
    /// Byline class of slot `index` in a list of `n` authors.
    pub fn classify(index: usize, n: usize) -> Position {
        debug_assert!(index < n);
        if n == 1 {
            Position::Single
        } else if index == 0 {
            Position::First
        } else if index + 1 == n {
            Position::Last
        } else {
            Position::Middle
        }
    }
}

/// Fractional credit of each author of an `n`-author publication.
pub fn fractional_weight(n: usize) -> f64 {
    assert!(n >= 1, "a publication has at least one author");
    1.0 / n as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct YearCounts {
    pub full: u32,
    pub fractional: f64,
    pub single: u32,
    pub first: u32,
    pub last: u32,
    pub middle: u32,
}

impl YearCounts {
    pub fn position(&self, p: Position) -> u32 {
        match p {
            Position::Single => self.single,
            Position::First => self.first,
            Position::Last => self.last,
            Position::Middle => self.middle,
        }
    }

    fn add(&mut self, position: Position, weight: f64) {
        self.full += 1;
        self.fractional += weight;
        match position {
            Position::Single => self.single += 1,
            Position::First => self.first += 1,
            Position::Last => self.last += 1,
            Position::Middle => self.middle += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorCareer {
    pub author_id: String,
    pub first_year: i32,
    pub last_year: i32,
    /// Index `Y - 1` holds career year `Y`.
    pub per_year: Vec<YearCounts>,
    pub disciplines: Vec<String>,
    pub countries: Vec<String>,
    pub gender: GenderLabel,
}

impl AuthorCareer {
    pub fn career_length(&self) -> u32 {
        (self.last_year - self.first_year + 1) as u32
    }

    /// Counts for 1-based career year `y`.
    pub fn year(&self, y: u32) -> Option<&YearCounts> {
        y.checked_sub(1).and_then(|i| self.per_year.get(i as usize))
    }

    pub fn total_publications(&self) -> u32 {
        self.per_year.iter().map(|y| y.full).sum()
    }
}

/// Items whose share of publications reaches `share`. `per_publication`
/// holds one set per publication; an empty set still counts in the denominator.
pub fn link_by_share<'a, I, S>(per_publication: I, share: f64) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n = 0usize;
    for set in per_publication {
        n += 1;
        let unique: BTreeSet<&str> = set.into_iter().collect();
        for item in unique {
            *counts.entry(item).or_default() += 1;
        }
    }
    if n == 0 {
        return BTreeSet::new();
    }
    counts
        .into_iter()
        .filter(|(_, c)| *c as f64 / n as f64 >= share)
        .map(|(item, _)| item.to_string())
        .collect()
}

/// Disciplines of sources carrying at least `share` of the publications.
/// Returns the linked set and the number of publications whose source is
/// missing from the classification.
pub fn link_disciplines(
    source_ids: &[&str],
    classification: &Classification,
    share: f64,
) -> (BTreeSet<String>, usize) {
    let mut missing = 0;
    let sets: Vec<Vec<&str>> = source_ids
        .iter()
        .map(|s| match classification.disciplines(s) {
            Some(ds) => ds.iter().map(String::as_str).collect(),
            None => {
                missing += 1;
                Vec::new()
            }
        })
        .collect();
    (link_by_share(sets, share), missing)
}

/// Countries appearing in the author's affiliations on at least `share` of
/// their publications.
pub fn link_countries(slot_countries: &[&[String]], share: f64) -> BTreeSet<String> {
    link_by_share(
        slot_countries
            .iter()
            .map(|cs| cs.iter().map(String::as_str)),
        share,
    )
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CareerReport {
    pub authors: usize,
    pub careers: usize,
    pub below_min_publications: usize,
    pub unclassified_publications: usize,
}

/// Builds careers for every author with at least `min_publications` counted
/// publications. The corpus is expected to be filtered by document type.
pub fn build_careers(
    corpus: &Corpus,
    profiles: &[AuthorProfile],
    classification: &Classification,
    config: &AnalysisConfig,
) -> (Vec<AuthorCareer>, CareerReport) {
    let genders: HashMap<&str, GenderLabel> = profiles
        .iter()
        .map(|p| (p.author_id.as_str(), p.gender))
        .collect();

    // author -> (record index, byline index); one entry per publication
    let mut slots: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for (ri, rec) in corpus.records.iter().enumerate() {
        for (si, slot) in rec.authors.iter().enumerate() {
            let entry = slots.entry(slot.author_id.as_str()).or_default();
            if entry.last().map(|&(r, _)| r) != Some(ri) {
                entry.push((ri, si));
            }
        }
    }

    let authors = slots.len();
    let grouped: Vec<(&str, Vec<(usize, usize)>)> = slots
        .into_iter()
        .filter(|(_, s)| s.len() >= config.min_publications)
        .collect();
    let below = authors - grouped.len();

    let built: Vec<(AuthorCareer, usize)> = grouped
        .par_iter()
        .map(|(id, slots)| {
            let records: Vec<(&PublicationRecord, usize)> = slots
                .iter()
                .map(|&(r, s)| (&corpus.records[r], s))
                .collect();
            let gender = genders.get(id).copied().unwrap_or(GenderLabel::NoInference);
            career_from_slots(id, &records, gender, classification, config.link_share)
        })
        .collect();

    let unclassified = built.iter().map(|(_, m)| m).sum();
    let careers: Vec<AuthorCareer> = built.into_iter().map(|(c, _)| c).collect();
    let report = CareerReport {
        authors,
        careers: careers.len(),
        below_min_publications: below,
        unclassified_publications: unclassified,
    };
    if unclassified > 0 {
        log::warn!(
            "{unclassified} career publications have sources missing from the classification"
        );
    }
    (careers, report)
}

fn career_from_slots(
    id: &str,
    records: &[(&PublicationRecord, usize)],
    gender: GenderLabel,
    classification: &Classification,
    share: f64,
) -> (AuthorCareer, usize) {
    let first_year = records
        .iter()
        .map(|(r, _)| r.year)
        .min()
        .expect("non-empty");
    let last_year = records
        .iter()
        .map(|(r, _)| r.year)
        .max()
        .expect("non-empty");
    let mut per_year = vec![YearCounts::default(); (last_year - first_year + 1) as usize];
    for (rec, slot) in records {
        let n = rec.authors.len();
        per_year[(rec.year - first_year) as usize]
            .add(Position::classify(*slot, n), fractional_weight(n));
    }
    let sources: Vec<&str> = records.iter().map(|(r, _)| r.source_id.as_str()).collect();
    let (disciplines, missing) = link_disciplines(&sources, classification, share);
    let countries: Vec<&[String]> = records
        .iter()
        .map(|(r, s)| r.authors[*s].countries.as_slice())
        .collect();
    let countries = link_countries(&countries, share);
    (
        AuthorCareer {
            author_id: id.to_string(),
            first_year,
            last_year,
            per_year,
            disciplines: disciplines.into_iter().collect(),
            countries: countries.into_iter().collect(),
            gender,
        },
        missing,
    )
}

pub fn write_careers(careers: &[AuthorCareer], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::write(path, e))?;
    let mut out = BufWriter::new(file);
    for c in careers {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n").map_err(|e| Error::write(path, e))?;
    }
    out.flush().map_err(|e| Error::write(path, e))
}

pub fn read_careers(path: &Path) -> Result<Vec<AuthorCareer>> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountryShare {
    pub share_unknown: f64,
    pub eligible: bool,
}

/// Countries whose share of unknown-gender authors stays within the threshold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EligibilitySet {
    pub countries: BTreeMap<String, CountryShare>,
}

impl EligibilitySet {
    pub fn is_eligible(&self, country: &str) -> bool {
        self.countries.get(country).is_some_and(|c| c.eligible)
    }

    pub fn eligible_countries(&self) -> impl Iterator<Item = &str> {
        self.countries
            .iter()
            .filter(|(_, s)| s.eligible)
            .map(|(c, _)| c.as_str())
    }

    /// Authors linked to at least one eligible country form the general population.
    pub fn covers(&self, career: &AuthorCareer) -> bool {
        career.countries.iter().any(|c| self.is_eligible(c))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_write_error(path, e))?;
        w.write_record(["country", "share_unknown", "eligible"])?;
        for (c, s) in &self.countries {
            w.write_record([
                c.as_str(),
                &s.share_unknown.to_string(),
                &s.eligible.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::write(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            country: String,
            share_unknown: f64,
            eligible: bool,
        }
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_read_error(path, e))?;
        let mut countries = BTreeMap::new();
        for row in r.deserialize::<Row>() {
            let row = row?;
            countries.insert(
                row.country,
                CountryShare {
                    share_unknown: row.share_unknown,
                    eligible: row.eligible,
                },
            );
        }
        Ok(EligibilitySet { countries })
    }
}

/// Unknown and no-inference labels both count as unknown gender. Countries
/// without linked authors are absent from the result.
pub fn compute_eligibility(careers: &[AuthorCareer], max_unknown_share: f64) -> EligibilitySet {
    let mut tallies: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for career in careers {
        let unknown = !career.gender.is_resolved();
        for c in &career.countries {
            let t = tallies.entry(c.as_str()).or_default();
            t.0 += 1;
            if unknown {
                t.1 += 1;
            }
        }
    }
    let countries = tallies
        .into_iter()
        .map(|(c, (n, u))| {
            let share_unknown = u as f64 / n as f64;
            (
                c.to_string(),
                CountryShare {
                    share_unknown,
                    eligible: share_unknown <= max_unknown_share,
                },
            )
        })
        .collect();
    EligibilitySet { countries }
}
