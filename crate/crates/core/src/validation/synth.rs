//! Seeded synthetic corpora with planted effects.
//!
//! Every career author follows a simple generative model:
//!
//! * career length `L` is drawn from per-year hazards, where `hazard[k]` is
//!   the probability that the career ends in career year `k + 1` given it
//!   reached that year (the last entry repeats). Careers still running at the
//!   end of the window are censored there.
//! * each interior career year is a gap (no publications) with probability
//!   `gap`; the first and last years always have publications.
//! * a non-gap year has `1 + Poisson(productivity - 1)` publications.
//! * authors with fewer than three publications get the shortfall added to
//!   their first career year.
//! * per publication, the byline is single-authored with probability
//!   `single_author`, otherwise 2..=`max_byline` long, with the author first,
//!   last or in the middle.
//!
//! Names are chosen so that the expected inference outcome is known: common
//! names resolve through each of the dictionary rules, ambiguous names stay
//! unknown, a share of authors in the last-name country are resolved by
//! surname suffix and regional names are resolved abroad by cross-country
//! votes.
//!
//! The ground truth holds exact realized values where the plan determines
//! them (start shares) and analytic expectations with a 3σ band elsewhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::corpus::{
    csv_write_error, AuthorSlot, Classification, Corpus, DocumentType, PublicationRecord,
};
use crate::countries;
use crate::error::{Error, Result};
use crate::gender::provider::ANY_COUNTRY;
use crate::gender::{
    GenderLabel, LastNameTables, NameDictionary, ProviderGender, ProviderResponse, Providers,
};
use crate::stats::{write_rows, CohortRow};
use crate::validation::{write_labels, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortSize {
    pub start_year: i32,
    pub male: usize,
    pub female: usize,
    /// Authors given ambiguous names; their true gender is a coin flip.
    pub unknown: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRates {
    pub hazard: Vec<f64>,
    /// Mean publications in a non-gap year, at least 1.
    pub productivity: f64,
    pub gap: f64,
    pub single_author: f64,
    pub first_author: f64,
    pub last_author: f64,
}

impl GroupRates {
    fn hazard_at(&self, k: u32) -> f64 {
        let i = (k as usize).min(self.hazard.len() - 1);
        self.hazard[i]
    }

    /// P(L >= y).
    fn survival(&self, y: u32) -> f64 {
        (0..y.saturating_sub(1))
            .map(|k| 1.0 - self.hazard_at(k))
            .product()
    }

    /// Expected share of publications in the given position.
    fn position_share(&self, first: bool, max_byline: usize) -> f64 {
        let pair = if max_byline == 2 {
            1.0
        } else {
            1.0 / (max_byline - 1) as f64
        };
        let p = if first {
            self.first_author
        } else {
            self.last_author
        };
        let two = p / (self.first_author + self.last_author);
        (1.0 - self.single_author) * (pair * two + (1.0 - pair) * p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weighted {
    pub code: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NamePools {
    pub male: Vec<String>,
    pub female: Vec<String>,
    pub ambiguous: Vec<String>,
    pub regional_male: Vec<String>,
    pub regional_female: Vec<String>,
    pub surnames: Vec<String>,
    pub lastname_stems: Vec<String>,
    pub lastname_male_suffix: String,
    pub lastname_female_suffix: String,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl Default for NamePools {
    fn default() -> Self {
        NamePools {
            male: strings(&[
                "james", "david", "thomas", "daniel", "peter", "michael", "paul", "robert",
                "marco", "lukas", "rahul", "hiroshi", "pedro", "ahmed", "ivan",
            ]),
            female: strings(&[
                "mary", "anna", "laura", "sarah", "julia", "elena", "sofia", "maria", "emma",
                "priya", "yuki", "ana", "fatima", "olga", "claire",
            ]),
            ambiguous: strings(&["kim", "alex", "sam", "robin", "jordan", "sasha"]),
            regional_male: strings(&["loic", "gaetan", "herve"]),
            regional_female: strings(&["maelle", "solene", "gaelle"]),
            surnames: strings(&[
                "smith", "garcia", "muller", "martin", "silva", "tanaka", "kumar", "okafor",
                "brown", "lee", "rossi", "dubois",
            ]),
            lastname_stems: strings(&["kowal", "nowakow", "wisniew", "lewandow", "zielin"]),
            lastname_male_suffix: "ski".into(),
            lastname_female_suffix: "ska".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub year_start: i32,
    pub year_end: i32,
    pub max_byline: usize,
    /// Share of career authors who also get one non-counted record.
    pub editorial_share: f64,
    pub journals_per_discipline: usize,
    /// Share of authors publishing only in journals classified under two disciplines.
    pub multidisciplinary_share: f64,
    pub ambiguous_country: Option<String>,
    /// Share of ambiguous-name authors placed in `ambiguous_country`.
    pub ambiguous_country_share: f64,
    pub lastname_country: Option<String>,
    pub lastname_share: f64,
    pub regional_country: Option<String>,
    pub regional_share: f64,
    pub gap_windows: Vec<u32>,
    pub cohorts: Vec<CohortSize>,
    pub male: GroupRates,
    pub female: GroupRates,
    pub disciplines: Vec<Weighted>,
    pub countries: Vec<Weighted>,
    pub names: NamePools,
}

fn weighted(pairs: &[(&str, f64)]) -> Vec<Weighted> {
    pairs
        .iter()
        .map(|&(code, weight)| Weighted {
            code: code.into(),
            weight,
        })
        .collect()
}

impl Default for SynthSpec {
    fn default() -> Self {
        let cohort = |start_year, male, female, unknown| CohortSize {
            start_year,
            male,
            female,
            unknown,
        };
        SynthSpec {
            seed: 20210601,
            year_start: 1996,
            year_end: 2018,
            max_byline: 5,
            editorial_share: 0.05,
            journals_per_discipline: 4,
            multidisciplinary_share: 0.08,
            ambiguous_country: Some("NG".into()),
            ambiguous_country_share: 0.6,
            lastname_country: Some("PL".into()),
            lastname_share: 0.5,
            regional_country: Some("FR".into()),
            regional_share: 0.1,
            gap_windows: vec![5, 10, 15],
            cohorts: vec![
                cohort(1998, 250, 150, 25),
                cohort(2000, 1100, 700, 110),
                cohort(2002, 250, 150, 25),
                cohort(2005, 1100, 700, 110),
                cohort(2008, 250, 150, 25),
                cohort(2010, 1100, 700, 110),
                cohort(2014, 250, 150, 25),
            ],
            male: GroupRates {
                hazard: vec![0.0, 0.04, 0.10, 0.11, 0.10, 0.09, 0.08, 0.07, 0.06],
                productivity: 2.36,
                gap: 0.20,
                single_author: 0.15,
                first_author: 0.35,
                last_author: 0.30,
            },
            female: GroupRates {
                hazard: vec![0.0, 0.05, 0.12, 0.13, 0.12, 0.11, 0.10, 0.09, 0.08],
                productivity: 2.0,
                gap: 0.21,
                single_author: 0.12,
                first_author: 0.40,
                last_author: 0.22,
            },
            disciplines: weighted(&[
                ("MEDI", 0.25),
                ("BIOC", 0.15),
                ("ENGI", 0.12),
                ("PHYS", 0.10),
                ("COMP", 0.10),
                ("SOCI", 0.10),
                ("CHEM", 0.08),
                ("MATH", 0.05),
                ("DECI", 0.05),
            ]),
            countries: weighted(&[
                ("US", 0.30),
                ("GB", 0.12),
                ("DE", 0.12),
                ("FR", 0.12),
                ("PL", 0.08),
                ("BR", 0.08),
                ("JP", 0.08),
                ("IN", 0.05),
                ("NG", 0.05),
            ]),
            names: NamePools::default(),
        }
    }
}

impl SynthSpec {
    /// Same spec with every cohort size multiplied by `factor` (at least one
    /// author per non-empty group).
    pub fn scaled(&self, factor: f64) -> SynthSpec {
        let scale = |n: usize| {
            if n == 0 {
                0
            } else {
                ((n as f64 * factor).round() as usize).max(1)
            }
        };
        let mut spec = self.clone();
        for c in &mut spec.cohorts {
            c.male = scale(c.male);
            c.female = scale(c.female);
            c.unknown = scale(c.unknown);
        }
        spec
    }

    pub fn load(path: &Path) -> Result<SynthSpec> {
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        let spec: SynthSpec = toml::from_str(&text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.year_start > self.year_end {
            return bad(format!(
                "empty window {}..{}",
                self.year_start, self.year_end
            ));
        }
        if self.max_byline < 2 {
            return bad("max_byline must be at least 2".into());
        }
        if self.journals_per_discipline == 0 {
            return bad("journals_per_discipline must be positive".into());
        }
        for (name, x) in [
            ("editorial_share", self.editorial_share),
            ("multidisciplinary_share", self.multidisciplinary_share),
            ("ambiguous_country_share", self.ambiguous_country_share),
            ("lastname_share", self.lastname_share),
            ("regional_share", self.regional_share),
        ] {
            if !unit(x) {
                return bad(format!("{name} = {x} is not a probability"));
            }
        }
        for (group, r) in [("male", &self.male), ("female", &self.female)] {
            if r.hazard.is_empty() {
                return bad(format!("{group}.hazard is empty"));
            }
            if let Some(h) = r.hazard.iter().find(|h| !unit(**h)) {
                return bad(format!("{group}.hazard contains {h}, outside [0, 1]"));
            }
            if !(r.productivity >= 1.0 && r.productivity.is_finite()) {
                return bad(format!("{group}.productivity must be at least 1"));
            }
            if !(0.0..1.0).contains(&r.gap) {
                return bad(format!("{group}.gap = {} is not in [0, 1)", r.gap));
            }
            for (name, x) in [
                ("single_author", r.single_author),
                ("first_author", r.first_author),
                ("last_author", r.last_author),
            ] {
                if !unit(x) {
                    return bad(format!("{group}.{name} = {x} is not a probability"));
                }
            }
            let ends = r.first_author + r.last_author;
            if ends > 1.0 || ends <= 0.0 {
                return bad(format!(
                    "{group}: first_author + last_author must be in (0, 1]"
                ));
            }
        }
        if self.cohorts.is_empty() {
            return bad("no cohorts".into());
        }
        for c in &self.cohorts {
            if c.start_year < self.year_start || c.start_year > self.year_end {
                return bad(format!("cohort {} outside the window", c.start_year));
            }
        }
        for (what, list) in [
            ("disciplines", &self.disciplines),
            ("countries", &self.countries),
        ] {
            if list.is_empty() || list.iter().any(|w| w.weight.is_nan() || w.weight < 0.0) {
                return bad(format!("{what} need non-negative weights"));
            }
            if list.iter().map(|w| w.weight).sum::<f64>() <= 0.0 {
                return bad(format!("{what} weights sum to zero"));
            }
        }
        for w in &self.countries {
            if !countries::is_known(&w.code) {
                return bad(format!("unknown country code {}", w.code));
            }
        }
        let n = &self.names;
        for (what, pool) in [
            ("male", &n.male),
            ("female", &n.female),
            ("ambiguous", &n.ambiguous),
            ("surnames", &n.surnames),
        ] {
            if pool.is_empty() {
                return bad(format!("name pool {what} is empty"));
            }
        }
        if self.regional_share > 0.0 && (n.regional_male.is_empty() || n.regional_female.is_empty())
        {
            return bad("regional name pools are empty".into());
        }
        if self.lastname_share > 0.0 && n.lastname_stems.is_empty() {
            return bad("last-name stems are empty".into());
        }
        let mut seen = BTreeSet::new();
        for name in n
            .male
            .iter()
            .chain(&n.female)
            .chain(&n.ambiguous)
            .chain(&n.regional_male)
            .chain(&n.regional_female)
        {
            if !seen.insert(name) {
                return bad(format!("first name {name} appears in more than one pool"));
            }
        }
        if self.ambiguous_country.is_some() && self.ambiguous_country == self.lastname_country {
            return bad("ambiguous_country and lastname_country must differ".into());
        }
        if self.lastname_country.is_some()
            && self
                .countries
                .iter()
                .all(|w| Some(&w.code) == self.lastname_country.as_ref() || w.weight == 0.0)
        {
            return bad("the last-name country cannot be the only country".into());
        }
        Ok(())
    }

    fn rates(&self, g: GenderLabel) -> &GroupRates {
        if g == GenderLabel::Female {
            &self.female
        } else {
            &self.male
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NameKind {
    Common,
    Ambiguous,
    Surname,
    Regional,
}

/// One generated career author, as planned.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedAuthor {
    pub author_id: String,
    pub true_gender: GenderLabel,
    /// Label the inference cascade should assign.
    pub expected_label: GenderLabel,
    pub start_year: i32,
    pub country: String,
    pub disciplines: Vec<String>,
    /// Publications per career year (index 0 is career year 1).
    pub per_year: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ProviderRow {
    name: String,
    country: String,
    gender: &'static str,
    samples: Option<u64>,
    probability: Option<f64>,
}

/// Everything a generator run produces.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub spec: SynthSpec,
    pub records: Vec<PublicationRecord>,
    pub classification: Classification,
    pub plan: Vec<PlannedAuthor>,
    pub ground_truth: Vec<CohortRow>,
    primary: Vec<ProviderRow>,
    guesser: Vec<ProviderRow>,
    fallback: Vec<ProviderRow>,
    lastnames: Vec<(String, String, GenderLabel)>,
}

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const CLASSIFICATION_FILE: &str = "classification.csv";
pub const PRIMARY_FILE: &str = "primary.csv";
pub const GUESSER_FILE: &str = "guesser.csv";
pub const FALLBACK_FILE: &str = "fallback.csv";
pub const LASTNAME_FILE: &str = "lastnames.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const SPEC_FILE: &str = "spec.toml";

impl SyntheticDataset {
    pub fn corpus(&self) -> Corpus {
        Corpus::new(self.records.clone())
    }

    pub fn labels(&self) -> Vec<Label> {
        self.plan
            .iter()
            .map(|a| Label {
                author_id: a.author_id.clone(),
                true_gender: a.true_gender,
            })
            .collect()
    }

    pub fn providers(&self) -> Providers {
        let dict = |rows: &[ProviderRow]| {
            let mut d = NameDictionary::new();
            for r in rows {
                let country = (r.country != ANY_COUNTRY).then_some(r.country.as_str());
                let gender = ProviderGender::parse(r.gender).expect("generator genders parse");
                d.insert(
                    &r.name,
                    country,
                    ProviderResponse::new(
                        gender,
                        r.samples.unwrap_or(0),
                        r.probability.unwrap_or(0.0),
                    ),
                );
            }
            d
        };
        Providers {
            primary: dict(&self.primary),
            guesser: dict(&self.guesser),
            fallback: dict(&self.fallback),
        }
    }

    pub fn lastname_tables(&self) -> LastNameTables {
        let mut t = LastNameTables::new();
        for (country, suffix, g) in &self.lastnames {
            t.insert(country, suffix, *g);
        }
        t
    }

    /// Analysis configuration matching the dataset, with paths relative to
    /// the directory the dataset is written to.
    pub fn config(&self) -> AnalysisConfig {
        let cohorts: Vec<i32> = self
            .spec
            .cohorts
            .iter()
            .map(|c| c.start_year)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let defaults = AnalysisConfig::default();
        AnalysisConfig {
            country_cohort: if cohorts.contains(&defaults.country_cohort) {
                defaults.country_cohort
            } else {
                cohorts[cohorts.len() / 2]
            },
            cohort_years: cohorts.clone(),
            discipline_cohorts: cohorts,
            year_start: self.spec.year_start,
            year_end: self.spec.year_end,
            seed: self.spec.seed,
            gap_windows: self.spec.gap_windows.clone(),
            corpus_path: Some(CORPUS_FILE.into()),
            classification_path: Some(CLASSIFICATION_FILE.into()),
            primary_provider_path: Some(PRIMARY_FILE.into()),
            guesser_provider_path: Some(GUESSER_FILE.into()),
            fallback_provider_path: Some(FALLBACK_FILE.into()),
            lastname_path: Some(LASTNAME_FILE.into()),
            labels_path: Some(LABELS_FILE.into()),
            ..defaults
        }
    }

    /// Writes corpus, classification, dictionaries, labels, ground truth, a
    /// matching config and a copy of the spec into `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::write(dir, e))?;
        self.corpus().write_jsonl(&dir.join(CORPUS_FILE))?;
        self.classification
            .write_csv(&dir.join(CLASSIFICATION_FILE))?;
        for (file, rows) in [
            (PRIMARY_FILE, &self.primary),
            (GUESSER_FILE, &self.guesser),
            (FALLBACK_FILE, &self.fallback),
        ] {
            let path = dir.join(file);
            let mut w = csv::Writer::from_path(&path).map_err(|e| csv_write_error(&path, e))?;
            for r in rows.iter() {
                w.serialize(r)?;
            }
            if rows.is_empty() {
                w.write_record(["name", "country", "gender", "samples", "probability"])?;
            }
            w.flush().map_err(|e| Error::write(&path, e))?;
        }
        let path = dir.join(LASTNAME_FILE);
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_write_error(&path, e))?;
        w.write_record(["country", "suffix", "gender"])?;
        for (c, s, g) in &self.lastnames {
            w.write_record([c.as_str(), s.as_str(), g.as_str()])?;
        }
        w.flush().map_err(|e| Error::write(&path, e))?;
        write_labels(&self.labels(), &dir.join(LABELS_FILE))?;
        write_rows(&self.ground_truth, &dir.join(GROUND_TRUTH_FILE))?;

        let config = toml::to_string(&self.config()).map_err(|e| Error::Config(e.to_string()))?;
        let config_path = dir.join(CONFIG_FILE);
        fs::write(&config_path, config).map_err(|e| Error::write(&config_path, e))?;
        let spec = toml::to_string(&self.spec).map_err(|e| Error::Spec(e.to_string()))?;
        let spec_path = dir.join(SPEC_FILE);
        fs::write(&spec_path, spec).map_err(|e| Error::write(&spec_path, e))?;
        Ok(config_path)
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &'a [String]) -> &'a String {
    pool.choose(rng).expect("pools are validated non-empty")
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn draw_count(rng: &mut ChaCha8Rng, productivity: f64) -> u32 {
    let extra = productivity - 1.0;
    if extra <= 0.0 {
        return 1;
    }
    let poisson = Poisson::new(extra).expect("positive rate");
    1 + poisson.sample(rng) as u32
}

/// Runs the generator. Pure function of the spec (including its seed).
pub fn generate_corpus(spec: &SynthSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // journals
    let codes: Vec<&str> = spec.disciplines.iter().map(|w| w.code.as_str()).collect();
    let mut pairs: Vec<(String, String)> = Vec::new();
    let journal = |d: &str, j: usize| format!("S{d}{j}");
    let multi = |i: usize| {
        let next = codes[(i + 1) % codes.len()];
        (format!("M{}{}", codes[i], next), next)
    };
    for (i, d) in codes.iter().enumerate() {
        for j in 0..spec.journals_per_discipline {
            pairs.push((journal(d, j), d.to_string()));
        }
        if codes.len() > 1 {
            let (id, next) = multi(i);
            pairs.push((id.clone(), d.to_string()));
            pairs.push((id, next.to_string()));
        }
    }
    let classification = Classification::from_pairs(pairs);

    let discipline_dist = WeightedIndex::new(spec.disciplines.iter().map(|w| w.weight))
        .map_err(|e| Error::Spec(e.to_string()))?;
    let country_dist = WeightedIndex::new(spec.countries.iter().map(|w| w.weight))
        .map_err(|e| Error::Spec(e.to_string()))?;

    let mut records = Vec::new();
    let mut plan = Vec::new();
    let mut kinds = Vec::new();
    let mut first_names = Vec::new();
    let mut next_author = 0usize;
    let mut next_filler = 0usize;
    let mut next_pub = 0usize;

    for cohort in &spec.cohorts {
        let groups = [
            (GenderLabel::Male, cohort.male),
            (GenderLabel::Female, cohort.female),
            (GenderLabel::Unknown, cohort.unknown),
        ];
        for (group, count) in groups {
            for _ in 0..count {
                let author_id = format!("a{next_author:06}");
                next_author += 1;
                let true_gender = match group {
                    GenderLabel::Unknown => {
                        if rng.gen_bool(0.5) {
                            GenderLabel::Female
                        } else {
                            GenderLabel::Male
                        }
                    }
                    g => g,
                };
                let ambiguous = group == GenderLabel::Unknown;
                let country = loop {
                    if ambiguous {
                        if let Some(c) = &spec.ambiguous_country {
                            if rng.gen_bool(spec.ambiguous_country_share) {
                                break c.clone();
                            }
                        }
                    }
                    let c = &spec.countries[country_dist.sample(&mut rng)].code;
                    if !(ambiguous && Some(c) == spec.lastname_country.as_ref()) {
                        break c.clone();
                    }
                };

                let pools = &spec.names;
                let (kind, first, last) = if ambiguous {
                    (
                        NameKind::Ambiguous,
                        pick(&mut rng, &pools.ambiguous).clone(),
                        pick(&mut rng, &pools.surnames).clone(),
                    )
                } else if Some(&country) == spec.lastname_country.as_ref()
                    && rng.gen_bool(spec.lastname_share)
                {
                    let suffix = if true_gender == GenderLabel::Female {
                        &pools.lastname_female_suffix
                    } else {
                        &pools.lastname_male_suffix
                    };
                    let stem = pick(&mut rng, &pools.lastname_stems);
                    (
                        NameKind::Surname,
                        pick(&mut rng, &pools.ambiguous).clone(),
                        format!("{stem}{suffix}"),
                    )
                } else if spec.regional_country.is_some() && rng.gen_bool(spec.regional_share) {
                    let pool = if true_gender == GenderLabel::Female {
                        &pools.regional_female
                    } else {
                        &pools.regional_male
                    };
                    (
                        NameKind::Regional,
                        pick(&mut rng, pool).clone(),
                        pick(&mut rng, &pools.surnames).clone(),
                    )
                } else {
                    let pool = if true_gender == GenderLabel::Female {
                        &pools.female
                    } else {
                        &pools.male
                    };
                    (
                        NameKind::Common,
                        pick(&mut rng, pool).clone(),
                        pick(&mut rng, &pools.surnames).clone(),
                    )
                };
                let mut raw_first = capitalize(&first);
                if rng.gen_bool(0.2) {
                    let initial = (b'A' + rng.gen_range(0..26u8)) as char;
                    raw_first.push_str(&format!(" {initial}."));
                }
                let raw_last = capitalize(&last);

                let d = discipline_dist.sample(&mut rng);
                let in_multi = codes.len() > 1 && rng.gen_bool(spec.multidisciplinary_share);
                let disciplines: Vec<String> = if in_multi {
                    let mut v = vec![codes[d].to_string(), multi(d).1.to_string()];
                    v.sort();
                    v
                } else {
                    vec![codes[d].to_string()]
                };

                // career length, censored at the end of the window
                let rates = spec.rates(true_gender);
                let max_len = (spec.year_end - cohort.start_year + 1) as u32;
                let mut len = 1u32;
                while len < max_len && !rng.gen_bool(rates.hazard_at(len - 1)) {
                    len += 1;
                }
                let mut per_year = Vec::with_capacity(len as usize);
                for y in 1..=len {
                    let interior = y > 1 && y < len;
                    if interior && rng.gen_bool(rates.gap) {
                        per_year.push(0);
                    } else {
                        per_year.push(draw_count(&mut rng, rates.productivity));
                    }
                }
                let total: u32 = per_year.iter().sum();
                if total < 3 {
                    per_year[0] += 3 - total;
                }

                let slot = AuthorSlot {
                    author_id: author_id.clone(),
                    raw_first_name: raw_first,
                    raw_last_name: raw_last,
                    countries: vec![country.clone()],
                };
                for (y, &n) in per_year.iter().enumerate() {
                    let year = cohort.start_year + y as i32;
                    for _ in 0..n {
                        let source_id = if in_multi {
                            multi(d).0
                        } else {
                            journal(codes[d], rng.gen_range(0..spec.journals_per_discipline))
                        };
                        let (size, at) = if rng.gen_bool(rates.single_author) {
                            (1, 0)
                        } else {
                            let size = rng.gen_range(2..=spec.max_byline);
                            let u: f64 = rng.gen();
                            let at = if size == 2 {
                                if u < rates.first_author / (rates.first_author + rates.last_author)
                                {
                                    0
                                } else {
                                    1
                                }
                            } else if u < rates.first_author {
                                0
                            } else if u < rates.first_author + rates.last_author {
                                size - 1
                            } else {
                                rng.gen_range(1..size - 1)
                            };
                            (size, at)
                        };
                        let authors = (0..size)
                            .map(|i| {
                                if i == at {
                                    slot.clone()
                                } else {
                                    next_filler += 1;
                                    AuthorSlot {
                                        author_id: format!("f{next_filler:07}"),
                                        raw_first_name: String::new(),
                                        raw_last_name: String::new(),
                                        countries: vec![],
                                    }
                                }
                            })
                            .collect();
                        next_pub += 1;
                        records.push(PublicationRecord {
                            pub_id: format!("p{next_pub:07}"),
                            year,
                            document_type: DocumentType::Article,
                            source_id,
                            authors,
                        });
                    }
                }
                if rng.gen_bool(spec.editorial_share) {
                    next_pub += 1;
                    records.push(PublicationRecord {
                        pub_id: format!("p{next_pub:07}"),
                        year: cohort.start_year + rng.gen_range(0..len) as i32,
                        document_type: DocumentType::Other,
                        source_id: journal(codes[d], 0),
                        authors: vec![slot.clone()],
                    });
                }

                kinds.push(kind);
                first_names.push(first);
                plan.push(PlannedAuthor {
                    author_id,
                    true_gender,
                    expected_label: GenderLabel::NoInference,
                    start_year: cohort.start_year,
                    country,
                    disciplines,
                    per_year,
                });
            }
        }
    }

    // regional names resolve abroad only when someone at home carries them
    let at_home: BTreeSet<&str> = plan
        .iter()
        .zip(&kinds)
        .zip(&first_names)
        .filter(|((a, k), _)| {
            **k == NameKind::Regional && Some(&a.country) == spec.regional_country.as_ref()
        })
        .map(|(_, f)| f.as_str())
        .collect();
    for ((author, kind), first) in plan.iter_mut().zip(&kinds).zip(&first_names) {
        author.expected_label = match kind {
            NameKind::Common | NameKind::Surname => author.true_gender,
            NameKind::Ambiguous => GenderLabel::Unknown,
            NameKind::Regional => {
                if at_home.contains(first.as_str()) {
                    author.true_gender
                } else {
                    GenderLabel::NoInference
                }
            }
        };
    }

    let (primary, guesser, fallback) = provider_rows(spec);
    let lastnames = match &spec.lastname_country {
        Some(c) => vec![
            (
                c.clone(),
                spec.names.lastname_male_suffix.clone(),
                GenderLabel::Male,
            ),
            (
                c.clone(),
                spec.names.lastname_female_suffix.clone(),
                GenderLabel::Female,
            ),
        ],
        None => vec![],
    };
    let ground_truth = ground_truth(spec, &plan);
    Ok(SyntheticDataset {
        spec: spec.clone(),
        records,
        classification,
        plan,
        ground_truth,
        primary,
        guesser,
        fallback,
        lastnames,
    })
}

/// Common names cycle through three dictionary profiles so that each of the
/// first four cascade rules fires: a confident primary entry, a weak primary
/// entry backed by the country-free guesser, and a fallback-only entry.
fn provider_rows(spec: &SynthSpec) -> (Vec<ProviderRow>, Vec<ProviderRow>, Vec<ProviderRow>) {
    let row = |name: &str, country: &str, gender, samples, probability| ProviderRow {
        name: name.to_string(),
        country: country.to_string(),
        gender,
        samples,
        probability,
    };
    let (mut primary, mut guesser, mut fallback) = (Vec::new(), Vec::new(), Vec::new());
    for (pool, gender) in [(&spec.names.male, "male"), (&spec.names.female, "female")] {
        for (i, name) in pool.iter().enumerate() {
            match i % 3 {
                0 => primary.push(row(name, ANY_COUNTRY, gender, Some(500), Some(0.99))),
                1 => {
                    primary.push(row(name, ANY_COUNTRY, gender, Some(5), Some(0.8)));
                    guesser.push(row(name, ANY_COUNTRY, gender, None, None));
                }
                _ => fallback.push(row(name, ANY_COUNTRY, gender, Some(20), Some(0.95))),
            }
        }
    }
    for name in &spec.names.ambiguous {
        primary.push(row(name, ANY_COUNTRY, "female", Some(50), Some(0.6)));
    }
    if let Some(home) = &spec.regional_country {
        for (pool, gender) in [
            (&spec.names.regional_male, "male"),
            (&spec.names.regional_female, "female"),
        ] {
            for name in pool {
                primary.push(row(name, home, gender, Some(200), Some(0.98)));
            }
        }
    }
    (primary, guesser, fallback)
}

/// Mean and second moment of the number of zero runs of each length
/// (index 0 is length 1) in the first `window` years, for a member whose
/// career reaches `window` years. With probability `q` year `window` is
/// the last career year and so has publications.
pub(crate) fn gap_moments(gap: f64, q: f64, window: u32) -> Vec<(f64, f64)> {
    let w = window as usize;
    let mut moments = vec![(0.0, 0.0); w];
    let mut accumulate = |free: usize, weight: f64| {
        if weight == 0.0 {
            return;
        }
        for mask in 0u32..(1 << free) {
            // year 1 is active, years 2..=free+1 follow the mask, the rest active
            let zeros = mask.count_ones() as i32;
            let p = weight * gap.powi(zeros) * (1.0 - gap).powi(free as i32 - zeros);
            let mut counts = vec![0u32; w];
            let mut run = 0usize;
            for year in 1..w {
                let zero = year <= free && mask & (1 << (year - 1)) != 0;
                if zero {
                    run += 1;
                } else if run > 0 {
                    counts[run - 1] += 1;
                    run = 0;
                }
            }
            if run > 0 {
                counts[run - 1] += 1;
            }
            for (m, &c) in moments.iter_mut().zip(&counts) {
                m.0 += p * c as f64;
                m.1 += p * (c * c) as f64;
            }
        }
    };
    if w >= 2 {
        accumulate(w - 2, q);
        accumulate(w - 1, 1.0 - q);
    }
    moments
}

fn band(value: f64, sigma: f64) -> Option<(f64, f64)> {
    Some((value - 3.0 * sigma, value + 3.0 * sigma))
}

fn ratio_sigma(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let r = a.0 / b.0;
    (r, r * ((a.1 / a.0).powi(2) + (b.1 / b.0).powi(2)).sqrt())
}

/// Realized start shares plus expected hazards, productivity, authorship
/// positions and gaps, each with a 3σ band given the planned population.
fn ground_truth(spec: &SynthSpec, plan: &[PlannedAuthor]) -> Vec<CohortRow> {
    let max_unknown = AnalysisConfig::default().unknown_share;
    let mut tallies: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for a in plan {
        let t = tallies.entry(a.country.as_str()).or_default();
        t.0 += 1;
        if !a.expected_label.is_resolved() {
            t.1 += 1;
        }
    }
    let eligible: BTreeSet<&str> = tallies
        .into_iter()
        .filter(|(_, (n, u))| *u as f64 / *n as f64 <= max_unknown)
        .map(|(c, _)| c)
        .collect();

    // resolved, eligible members per (cohort, gender)
    let mut sizes: BTreeMap<(i32, GenderLabel), u64> = BTreeMap::new();
    for a in plan {
        if a.expected_label.is_resolved() && eligible.contains(a.country.as_str()) {
            *sizes.entry((a.start_year, a.expected_label)).or_default() += 1;
        }
    }

    let genders = [GenderLabel::Male, GenderLabel::Female];
    let mut rows = Vec::new();
    let starts: BTreeSet<i32> = spec.cohorts.iter().map(|c| c.start_year).collect();
    for &start in &starts {
        let n: Vec<u64> = genders
            .iter()
            .map(|g| sizes.get(&(start, *g)).copied().unwrap_or(0))
            .collect();
        let total = n[0] + n[1];
        if total == 0 {
            continue;
        }
        for (g, k) in genders.iter().zip(&n) {
            rows.push(
                CohortRow::new("start_share", *k as f64 / total as f64, total)
                    .cohort(start)
                    .gender(*g),
            );
        }
    }

    for &start in &starts {
        let max_len = (spec.year_end - start + 1) as u32;
        let size = |g: GenderLabel| sizes.get(&(start, g)).copied().unwrap_or(0) as f64;
        if genders.iter().any(|g| size(*g) == 0.0) {
            continue;
        }
        let q = |r: &GroupRates, y: u32| {
            if y >= max_len {
                1.0
            } else {
                r.hazard_at(y - 1)
            }
        };

        for g in genders {
            let r = spec.rates(g);
            for y in 1..=max_len.saturating_sub(2) {
                let h = r.hazard_at(y);
                let n = size(g) * r.survival(y + 1);
                let sigma = (h * (1.0 - h) / n).sqrt();
                rows.push(
                    CohortRow::new("hazard", h, n.round() as u64)
                        .cohort(start)
                        .gender(g)
                        .career_year(y)
                        .interval(band(h, sigma)),
                );
            }
        }

        let productivity = |g: GenderLabel, y: u32| {
            let r = spec.rates(g);
            let p = 1.0 - r.gap * (1.0 - q(r, y));
            let c = r.productivity;
            let mean = p * c;
            let var = p * ((c - 1.0) + c * c) - mean * mean;
            let n = size(g) * r.survival(y);
            (mean, (var / n).sqrt(), n)
        };
        for y in 2..=max_len {
            let mut per_gender = Vec::new();
            for g in genders {
                let (mean, sigma, n) = productivity(g, y);
                per_gender.push((mean, sigma));
                rows.push(
                    CohortRow::new("productivity_full", mean, n.round() as u64)
                        .cohort(start)
                        .gender(g)
                        .career_year(y)
                        .interval(band(mean, sigma)),
                );
                let r = spec.rates(g);
                for (stat, first) in [("first_author_prob", true), ("last_author_prob", false)] {
                    let p = r.position_share(first, spec.max_byline);
                    let pubs = n * mean;
                    rows.push(
                        CohortRow::new(stat, p, pubs.round() as u64)
                            .cohort(start)
                            .gender(g)
                            .career_year(y)
                            .interval(band(p, (p * (1.0 - p) / pubs).sqrt())),
                    );
                }
            }
            let (ratio, sigma) = ratio_sigma(per_gender[0], per_gender[1]);
            rows.push(
                CohortRow::new("productivity_full_ratio", ratio, 0)
                    .cohort(start)
                    .career_year(y)
                    .interval(band(ratio, sigma)),
            );
        }

        for &w in &spec.gap_windows {
            if w < 2 || w > max_len {
                continue;
            }
            let mut first_len = Vec::new();
            for g in genders {
                let r = spec.rates(g);
                let n = size(g) * r.survival(w);
                let moments = gap_moments(r.gap, q(r, w), w);
                for (i, &(mean, second)) in moments.iter().enumerate().take(w as usize - 1) {
                    let sigma = ((second - mean * mean).max(0.0) / n).sqrt();
                    if i == 0 {
                        first_len.push((mean, sigma));
                    }
                    rows.push(
                        CohortRow::new(format!("gap_len_{}", i + 1), mean, n.round() as u64)
                            .cohort(start)
                            .gender(g)
                            .career_year(w)
                            .interval(band(mean, sigma)),
                    );
                }
            }
            let (ratio, sigma) = ratio_sigma(first_len[1], first_len[0]);
            rows.push(
                CohortRow::new("gap_len_1_ratio", ratio, 0)
                    .cohort(start)
                    .career_year(w)
                    .interval(band(ratio, sigma)),
            );
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let spec = SynthSpec::default().scaled(0.02);
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.ground_truth, b.ground_truth);
        let mut other = spec.clone();
        other.seed += 1;
        assert_ne!(generate_corpus(&other).unwrap().records, a.records);
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        let mut spec = SynthSpec::default();
        spec.male.hazard[3] = 1.2;
        assert!(matches!(generate_corpus(&spec), Err(Error::Spec(_))));
        let mut spec = SynthSpec::default();
        spec.female.productivity = 0.5;
        assert!(spec.validate().is_err());
        let mut spec = SynthSpec::default();
        spec.male.first_author = 0.8;
        assert!(spec.validate().is_err());
        let mut spec = SynthSpec::default();
        spec.cohorts[0].start_year = 1990;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn every_author_has_three_counted_publications() {
        let data = generate_corpus(&SynthSpec::default().scaled(0.02)).unwrap();
        for a in &data.plan {
            assert!(a.per_year.iter().sum::<u32>() >= 3);
            assert!(a.per_year[0] > 0 && *a.per_year.last().unwrap() > 0);
        }
    }

    #[test]
    fn single_gap_closed_form() {
        // a zero at a free position is a run of length one when both
        // neighbours are active or outside the window
        let closed = |g: f64, free: usize| {
            let mut e = 0.0;
            for pos in 0..free {
                let left = if pos == 0 { 1.0 } else { 1.0 - g };
                let right = if pos + 1 < free { 1.0 - g } else { 1.0 };
                e += g * left * right;
            }
            e
        };
        for &(g, q, w) in &[
            (0.2, 0.1, 10u32),
            (0.21, 0.0, 5),
            (0.5, 1.0, 6),
            (0.05, 0.3, 15),
        ] {
            let m = gap_moments(g, q, w);
            let w = w as usize;
            let expected = q * closed(g, w - 2) + (1.0 - q) * closed(g, w - 1);
            assert!(
                (m[0].0 - expected).abs() < 1e-12,
                "{g} {q} {w}: {} vs {expected}",
                m[0].0
            );
        }
    }

    #[test]
    fn gap_probabilities_cover_all_patterns() {
        // zero gap probability: no runs at all
        assert!(gap_moments(0.0, 0.4, 8).iter().all(|m| m.0 == 0.0));
        // certain gaps without a closing year: one run covering years 2..=w
        let m = gap_moments(1.0, 0.0, 6);
        assert_eq!(m[4], (1.0, 1.0));
    }

    #[test]
    fn written_files_reload() {
        let dir = tempfile::tempdir().unwrap();
        let data = generate_corpus(&SynthSpec::default().scaled(0.01)).unwrap();
        let config_path = data.write(dir.path()).unwrap();
        let config = AnalysisConfig::load(&config_path).unwrap();
        assert_eq!(
            config.corpus_path.as_deref(),
            Some(dir.path().join(CORPUS_FILE).as_path())
        );
        let spec = SynthSpec::load(&dir.path().join(SPEC_FILE)).unwrap();
        assert_eq!(spec, data.spec);
        let labels = crate::validation::read_labels(&dir.path().join(LABELS_FILE)).unwrap();
        assert_eq!(labels.len(), data.plan.len());
    }
}
