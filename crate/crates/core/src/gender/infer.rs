use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::{
    AuthorProfile, CountryResult, GenderLabel, LastNameTables, Origin, Provenance, Providers, Rule,
    Thresholds,
};
use crate::config::AnalysisConfig;
use crate::corpus::{AuthorSlot, Corpus};
use crate::error::{Error, Result};
use crate::names::clean_first_name_with;

/// Countries of origin from the affiliation countries of an author's
/// publications, given in chronological order.
///
/// If a country the author is most often associated with is also a country of
/// the first publication carrying any country, those countries are returned.
/// Otherwise every country the author is associated with is returned.
pub fn determine_countries_of_origin<S: AsRef<str>>(history: &[Vec<S>]) -> BTreeSet<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for pub_countries in history {
        let unique: BTreeSet<&str> = pub_countries.iter().map(AsRef::as_ref).collect();
        for c in unique {
            *counts.entry(c).or_default() += 1;
        }
    }
    let Some(&max) = counts.values().max() else {
        return BTreeSet::new();
    };
    let first: BTreeSet<&str> = history
        .iter()
        .find(|p| !p.is_empty())
        .map(|p| p.iter().map(AsRef::as_ref).collect())
        .unwrap_or_default();
    let modal_and_first: BTreeSet<String> = counts
        .iter()
        .filter(|(c, n)| **n == max && first.contains(*c))
        .map(|(c, _)| c.to_string())
        .collect();
    if modal_and_first.is_empty() {
        counts.keys().map(|c| c.to_string()).collect()
    } else {
        modal_and_first
    }
}

/// Applies the cascade rule-major over candidate names: rule 1 to every
/// name, then rule 2 to every name, and so on.
pub fn infer_step2(
    candidates: &[String],
    country: Option<&str>,
    providers: &Providers,
    thresholds: &Thresholds,
) -> (GenderLabel, Provenance) {
    if candidates.is_empty() {
        return (GenderLabel::NoInference, Provenance::Step2None);
    }
    let responses: Vec<_> = candidates
        .iter()
        .map(|n| providers.responses(n, country))
        .collect();
    for rule in Rule::ALL {
        if let Some(label) = responses.iter().find_map(|r| rule.apply(r, thresholds)) {
            return (label, Provenance::from_rule(rule));
        }
    }
    unreachable!("R6 always fires")
}

/// Last-name rule for the countries that have a suffix table; passes the
/// step 2 result through unless it was inconclusive and a suffix matches.
pub fn infer_step3_lastname(
    step2: (GenderLabel, Provenance),
    last_name: &str,
    country: Option<&str>,
    tables: &LastNameTables,
) -> (GenderLabel, Provenance) {
    if step2.0.is_resolved() {
        return step2;
    }
    match country.and_then(|c| tables.infer(c, last_name)) {
        Some(g) => (g, Provenance::Step3),
        None => step2,
    }
}

/// Unanimity over per-country results.
pub fn combine_step5(results: &[(GenderLabel, Provenance)]) -> (GenderLabel, Provenance) {
    match results.split_first() {
        None => (GenderLabel::NoInference, Provenance::Step2None),
        Some((first, rest)) => {
            if rest.iter().all(|r| r.0 == first.0) {
                *first
            } else {
                (GenderLabel::Unknown, Provenance::Step5Conflict)
            }
        }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Votes {
    male: u64,
    female: u64,
}

impl Votes {
    fn add(&mut self, g: GenderLabel) {
        match g {
            GenderLabel::Male => self.male += 1,
            GenderLabel::Female => self.female += 1,
            _ => {}
        }
    }
}

#[derive(Debug, Default)]
struct NameVotes {
    total: Votes,
    by_country: HashMap<String, Votes>,
}

/// First name to resolved-gender votes, built from results of steps 1 to 3
/// only. Only male and female labels vote.
#[derive(Debug, Default)]
pub struct NameIndex {
    names: HashMap<String, NameVotes>,
}

impl NameIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, candidates: &[String], origin: &Origin, gender: GenderLabel) {
        if !gender.is_resolved() {
            return;
        }
        for name in candidates {
            let entry = self.names.entry(name.clone()).or_default();
            entry.total.add(gender);
            if let Origin::Countries(cs) = origin {
                for c in cs {
                    entry.by_country.entry(c.clone()).or_default().add(gender);
                }
            }
        }
    }

    /// Votes from authors sharing `name` whose countries of origin exclude `country`.
    fn votes_elsewhere(&self, name: &str, country: Option<&str>) -> Votes {
        let Some(entry) = self.names.get(name) else {
            return Votes::default();
        };
        let local = country
            .and_then(|c| entry.by_country.get(c))
            .copied()
            .unwrap_or_default();
        Votes {
            male: entry.total.male - local.male,
            female: entry.total.female - local.female,
        }
    }
}

/// Cross-country agreement for a name that got no inference at all.
/// Returns `None` when no other-country author shares any candidate name.
pub fn infer_step4_cross_country(
    candidates: &[String],
    country: Option<&str>,
    index: &NameIndex,
) -> Option<(GenderLabel, Provenance)> {
    let mut votes = Votes::default();
    for name in candidates {
        let v = index.votes_elsewhere(name, country);
        votes.male += v.male;
        votes.female += v.female;
    }
    match (votes.male > 0, votes.female > 0) {
        (false, false) => None,
        (true, false) => Some((GenderLabel::Male, Provenance::Step4)),
        (false, true) => Some((GenderLabel::Female, Provenance::Step4)),
        (true, true) => Some((GenderLabel::Unknown, Provenance::Step4Unknown)),
    }
}

struct Prelim {
    author_id: String,
    first_name: String,
    last_name: String,
    candidates: Vec<String>,
    origin: Origin,
    per_country: Vec<CountryResult>,
}

impl Prelim {
    fn combined(&self) -> (GenderLabel, Provenance) {
        let results: Vec<_> = self
            .per_country
            .iter()
            .map(|r| (r.gender, r.provenance))
            .collect();
        combine_step5(&results)
    }
}

/// The most frequent non-empty spelling; ties go to the longer, then the
/// lexicographically smaller one.
fn representative<'a>(names: impl Iterator<Item = &'a str>) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in names.map(str::trim).filter(|n| !n.is_empty()) {
        *counts.entry(n).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| {
            a.1.cmp(&b.1)
                .then(a.0.chars().count().cmp(&b.0.chars().count()))
                .then(b.0.cmp(a.0))
        })
        .map(|(n, _)| n.to_string())
        .unwrap_or_default()
}

/// Runs all five steps for every author in the corpus. Output is sorted by
/// author id and does not depend on thread count.
pub fn infer_profiles(
    corpus: &Corpus,
    providers: &Providers,
    lastnames: &LastNameTables,
    config: &AnalysisConfig,
) -> Vec<AuthorProfile> {
    let thresholds = Thresholds::from(config);

    // author -> slots in (year, corpus order)
    let mut histories: BTreeMap<&str, Vec<(i32, usize, &AuthorSlot)>> = BTreeMap::new();
    for (idx, rec) in corpus.records.iter().enumerate() {
        for slot in &rec.authors {
            histories
                .entry(slot.author_id.as_str())
                .or_default()
                .push((rec.year, idx, slot));
        }
    }
    let histories: Vec<_> = histories
        .into_iter()
        .map(|(id, mut h)| {
            h.sort_by_key(|&(y, i, _)| (y, i));
            (id, h)
        })
        .collect();

    let prelims: Vec<Prelim> = histories
        .par_iter()
        .map(|(id, history)| {
            let countries: Vec<Vec<&str>> = history
                .iter()
                .map(|(_, _, s)| s.countries.iter().map(String::as_str).collect())
                .collect();
            let origins = determine_countries_of_origin(&countries);
            let origin = if origins.is_empty() {
                Origin::Unresolvable
            } else {
                Origin::Countries(origins.into_iter().collect())
            };
            let first_name =
                representative(history.iter().map(|(_, _, s)| s.raw_first_name.as_str()));
            let last_name =
                representative(history.iter().map(|(_, _, s)| s.raw_last_name.as_str()));
            let candidates = clean_first_name_with(&first_name, config.ascii_fold).candidates;
            let per_country = origin
                .lookup_countries()
                .into_iter()
                .map(|country| {
                    let step2 = infer_step2(&candidates, country, providers, &thresholds);
                    let (gender, provenance) =
                        infer_step3_lastname(step2, &last_name, country, lastnames);
                    CountryResult {
                        country: country.map(str::to_string),
                        gender,
                        provenance,
                    }
                })
                .collect();
            Prelim {
                author_id: id.to_string(),
                first_name,
                last_name,
                candidates,
                origin,
                per_country,
            }
        })
        .collect();

    let mut index = NameIndex::new();
    for p in &prelims {
        index.add(&p.candidates, &p.origin, p.combined().0);
    }

    prelims
        .into_par_iter()
        .map(|mut p| {
            for r in &mut p.per_country {
                if r.gender != GenderLabel::NoInference {
                    continue;
                }
                if let Some((g, prov)) =
                    infer_step4_cross_country(&p.candidates, r.country.as_deref(), &index)
                {
                    r.gender = g;
                    r.provenance = prov;
                }
            }
            let (gender, provenance) = p.combined();
            AuthorProfile {
                author_id: p.author_id,
                first_name: p.first_name,
                last_name: p.last_name,
                candidates: p.candidates,
                origin: p.origin,
                per_country: p.per_country,
                gender,
                provenance,
            }
        })
        .collect()
}

pub fn write_profiles(profiles: &[AuthorProfile], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::write(path, e))?;
    let mut out = BufWriter::new(file);
    for p in profiles {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(|e| Error::write(path, e))?;
    }
    out.flush().map_err(|e| Error::write(path, e))
}

pub fn read_profiles(path: &Path) -> Result<Vec<AuthorProfile>> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
