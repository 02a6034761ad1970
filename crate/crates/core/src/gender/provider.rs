//! Offline name-gender dictionaries.
//!
//! Each dictionary is a CSV `name,country,gender,samples,probability` where
//! `country` is an ISO alpha-2 code or `*` for country-independent rows.
//! Lines starting with `#` are comments.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::names::clean_first_name_with;

pub const ANY_COUNTRY: &str = "*";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderGender {
    Male,
    Female,
    /// The provider knows the name but will not commit to a gender.
    Unknown,
    /// The provider has no entry for the name.
    None,
}

impl ProviderGender {
    pub fn is_resolved(self) -> bool {
        matches!(self, ProviderGender::Male | ProviderGender::Female)
    }

    /// Only exact `male`/`female` resolve; graded categories such as
    /// `mostly_male` or `andy` are unknown.
    pub fn parse(s: &str) -> Option<ProviderGender> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" | "m" => Some(ProviderGender::Male),
            "female" | "f" => Some(ProviderGender::Female),
            "unknown" | "mostly_male" | "mostly_female" | "andy" | "ambiguous" => {
                Some(ProviderGender::Unknown)
            }
            "none" | "" => Some(ProviderGender::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProviderResponse {
    pub gender: ProviderGender,
    pub samples: u64,
    pub probability: f64,
}

impl ProviderResponse {
    pub const NONE: ProviderResponse = ProviderResponse {
        gender: ProviderGender::None,
        samples: 0,
        probability: 0.0,
    };

    pub fn new(gender: ProviderGender, samples: u64, probability: f64) -> Self {
        ProviderResponse {
            gender,
            samples,
            probability,
        }
    }

    /// A categorical answer without sample counts.
    pub fn category(gender: ProviderGender) -> Self {
        ProviderResponse::new(gender, 0, 0.0)
    }
}

/// Counted dictionaries carry sample sizes and must satisfy
/// `samples == 0 => gender in {unknown, none}`; categorical ones ignore samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderRole {
    Counted,
    Categorical,
}

#[derive(Debug, Clone, Default)]
pub struct NameDictionary {
    entries: HashMap<(String, String), ProviderResponse>,
}

impl NameDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `country` of `None` inserts a country-independent entry.
    pub fn insert(&mut self, name: &str, country: Option<&str>, response: ProviderResponse) {
        let key = (name.to_string(), country.unwrap_or(ANY_COUNTRY).to_string());
        self.entries.insert(key, response);
    }

    /// Exact lookup: the country row, or the `*` row when `country` is `None`.
    pub fn lookup_exact(&self, name: &str, country: Option<&str>) -> ProviderResponse {
        self.entries
            .get(&(name.to_string(), country.unwrap_or(ANY_COUNTRY).to_string()))
            .copied()
            .unwrap_or(ProviderResponse::NONE)
    }

    /// Country row if present, otherwise the country-independent row.
    pub fn lookup(&self, name: &str, country: Option<&str>) -> ProviderResponse {
        match country {
            Some(c) => {
                let hit = self.lookup_exact(name, Some(c));
                if hit.gender == ProviderGender::None {
                    self.lookup_exact(name, None)
                } else {
                    hit
                }
            }
            None => self.lookup_exact(name, None),
        }
    }

    pub fn read_csv(path: &Path, role: ProviderRole, ascii_fold: bool) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            name: String,
            country: String,
            gender: String,
            #[serde(default)]
            samples: Option<u64>,
            #[serde(default)]
            probability: Option<f64>,
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| crate::corpus::csv_read_error(path, e))?;
        let mut dict = NameDictionary::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            let malformed = |message: String| Error::Malformed {
                path: path.to_path_buf(),
                line: i + 2,
                message,
            };
            let gender = ProviderGender::parse(&row.gender)
                .ok_or_else(|| malformed(format!("unrecognised gender {:?}", row.gender)))?;
            let samples = row.samples.unwrap_or(0);
            let probability = row.probability.unwrap_or(0.0);
            if !(0.0..=1.0).contains(&probability) {
                return Err(malformed(format!(
                    "probability {probability} outside [0, 1]"
                )));
            }
            if role == ProviderRole::Counted && samples == 0 && gender.is_resolved() {
                return Err(malformed(format!(
                    "{} has gender {:?} with zero samples",
                    row.name, gender
                )));
            }
            // Dictionary keys go through the same cleaning as author names.
            let name = clean_first_name_with(&row.name, ascii_fold)
                .candidates
                .join(" ");
            if name.is_empty() {
                continue;
            }
            let country = if row.country == ANY_COUNTRY {
                None
            } else {
                Some(row.country.to_ascii_uppercase())
            };
            dict.insert(
                &name,
                country.as_deref(),
                ProviderResponse::new(gender, samples, probability),
            );
        }
        Ok(dict)
    }
}

/// The three dictionaries consulted by the rule cascade.
#[derive(Debug, Clone, Default)]
pub struct Providers {
    pub primary: NameDictionary,
    pub guesser: NameDictionary,
    pub fallback: NameDictionary,
}

impl Providers {
    /// Collects every response the cascade needs for one name and country.
    pub fn responses(&self, name: &str, country: Option<&str>) -> super::Responses {
        super::Responses {
            primary: self.primary.lookup(name, country),
            guesser_with_country: match country {
                Some(c) => self.guesser.lookup_exact(name, Some(c)),
                None => ProviderResponse::NONE,
            },
            guesser_without_country: self.guesser.lookup_exact(name, None),
            fallback: self.fallback.lookup(name, country),
        }
    }
}
