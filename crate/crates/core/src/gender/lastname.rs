//! Last-name suffix rules for countries where surnames are gendered.
//!
//! CSV `country,suffix,gender`; the longest matching suffix wins.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::GenderLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct LastNameTables {
    by_country: HashMap<String, Vec<(String, GenderLabel)>>,
}

impl LastNameTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, country: &str, suffix: &str, gender: GenderLabel) {
        assert!(
            gender.is_resolved(),
            "suffix rules must map to male or female"
        );
        let suffix = suffix.trim().trim_start_matches('-').to_lowercase();
        let rules = self
            .by_country
            .entry(country.to_ascii_uppercase())
            .or_default();
        rules.push((suffix, gender));
        rules.sort_by(|a, b| {
            b.0.chars()
                .count()
                .cmp(&a.0.chars().count())
                .then(a.0.cmp(&b.0))
        });
    }

    pub fn has_country(&self, country: &str) -> bool {
        self.by_country.contains_key(country)
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.by_country.keys().map(String::as_str)
    }

    /// Gender implied by `last_name` in `country`, if a suffix matches.
    pub fn infer(&self, country: &str, last_name: &str) -> Option<GenderLabel> {
        let name = last_name.trim().to_lowercase();
        if name.is_empty() {
            return None;
        }
        self.by_country
            .get(country)?
            .iter()
            .find(|(suffix, _)| name.ends_with(suffix.as_str()) && name != *suffix)
            .map(|(_, g)| *g)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            country: String,
            suffix: String,
            gender: String,
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| crate::corpus::csv_read_error(path, e))?;
        let mut tables = LastNameTables::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            let gender = match row.gender.to_ascii_lowercase().as_str() {
                "male" => GenderLabel::Male,
                "female" => GenderLabel::Female,
                other => {
                    return Err(Error::Malformed {
                        path: path.to_path_buf(),
                        line: i + 2,
                        message: format!("suffix gender must be male or female, got {other:?}"),
                    })
                }
            };
            tables.insert(&row.country, &row.suffix, gender);
        }
        Ok(tables)
    }
}
