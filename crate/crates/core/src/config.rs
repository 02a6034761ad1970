//! Analysis configuration.
//!
//! A single flat TOML file. Every methodological constant is a named key whose
//! default is the published value, so a run with an empty file reproduces the
//! reference methodology. Any key can be overridden from the environment with
//! the `PUBCAREERS_` prefix, e.g. `PUBCAREERS_LINK_SHARE=0.75` or
//! `PUBCAREERS_COHORT_YEARS=[2000,2010]`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::DocumentType;
use crate::error::{Error, Result};

pub const ENV_PREFIX: &str = "PUBCAREERS_";

/// Top-level discipline codes (26, without the multidisciplinary category).
pub const DEFAULT_DISCIPLINES: [&str; 26] = [
    "AGRI", "ARTS", "BIOC", "BUSI", "CENG", "CHEM", "COMP", "DECI", "DENT", "EART", "ECON", "ENER",
    "ENGI", "ENVI", "HEAL", "IMMU", "MATE", "MATH", "MEDI", "NEUR", "NURS", "PHAR", "PHYS", "PSYC",
    "SOCI", "VETE",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// First publication year covered by the corpus (inclusive).
    pub year_start: i32,
    /// Last publication year covered by the corpus (inclusive).
    pub year_end: i32,
    pub document_types: Vec<DocumentType>,

    /// Authors with fewer counted publications are not given a career.
    pub min_publications: usize,
    /// Share of an author's publications needed to link a discipline or country.
    pub link_share: f64,
    /// Countries whose unknown-gender share exceeds this are not reported.
    pub unknown_share: f64,

    /// Probability floor for the counted name dictionaries.
    pub min_probability: f64,
    /// Primary dictionary: a result is trusted when samples exceed this.
    pub primary_min_samples: u64,
    /// Other providers are consulted only while primary samples do not exceed this.
    pub fallback_gate_samples: u64,
    /// Fallback counted dictionary: a result is trusted when samples exceed this.
    pub fallback_min_samples: u64,
    /// Fold diacritics in cleaned names before dictionary lookup.
    pub ascii_fold: bool,

    pub cohort_years: Vec<i32>,
    pub discipline_cohorts: Vec<i32>,
    pub country_cohort: i32,
    /// Career year used by the per-discipline productivity and authorship tables.
    pub snapshot_year: u32,
    /// Horizon (years) for the "ended within" table.
    pub ended_horizon: u32,
    pub gap_windows: Vec<u32>,

    pub disciplines: Vec<String>,
    /// Disciplines left out of per-discipline tables at report time.
    pub report_exclude_disciplines: Vec<String>,

    pub seed: u64,
    /// Worker threads; 0 means one per available core.
    pub threads: usize,
    /// Treat malformed corpus lines as fatal.
    pub strict: bool,

    pub corpus_path: Option<PathBuf>,
    pub classification_path: Option<PathBuf>,
    pub primary_provider_path: Option<PathBuf>,
    pub guesser_provider_path: Option<PathBuf>,
    pub fallback_provider_path: Option<PathBuf>,
    pub lastname_path: Option<PathBuf>,
    pub labels_path: Option<PathBuf>,
    pub synth_spec_path: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            year_start: 1996,
            year_end: 2018,
            document_types: DocumentType::COUNTED.to_vec(),
            min_publications: 3,
            link_share: 0.80,
            unknown_share: 0.33,
            min_probability: 0.90,
            primary_min_samples: 2,
            fallback_gate_samples: 10,
            fallback_min_samples: 3,
            ascii_fold: false,
            cohort_years: vec![2000, 2005, 2010],
            discipline_cohorts: vec![2000, 2010],
            country_cohort: 2010,
            snapshot_year: 6,
            ended_horizon: 5,
            gap_windows: vec![5, 10, 15],
            disciplines: DEFAULT_DISCIPLINES.iter().map(|s| s.to_string()).collect(),
            report_exclude_disciplines: vec!["DECI".to_string()],
            seed: 20210601,
            threads: 0,
            strict: false,
            corpus_path: None,
            classification_path: None,
            primary_provider_path: None,
            guesser_provider_path: None,
            fallback_provider_path: None,
            lastname_path: None,
            labels_path: None,
            synth_spec_path: None,
        }
    }
}

impl AnalysisConfig {
    /// Reads a config file, applies environment overrides and resolves
    /// relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_with_env(&text, base, std::env::vars())
    }

    pub fn from_toml_with_env<I>(text: &str, base: &Path, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut overrides: Vec<(String, String)> = env
            .into_iter()
            .filter_map(|(k, v)| {
                k.strip_prefix(ENV_PREFIX)
                    .map(|k| (k.to_ascii_lowercase(), v))
            })
            .collect();
        overrides.sort();
        for (key, raw) in overrides {
            table.insert(key, parse_env_value(&raw));
        }
        let mut config: AnalysisConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.resolve_paths(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        for slot in [
            &mut self.corpus_path,
            &mut self.classification_path,
            &mut self.primary_provider_path,
            &mut self.guesser_provider_path,
            &mut self.fallback_provider_path,
            &mut self.lastname_path,
            &mut self.labels_path,
            &mut self.synth_spec_path,
        ] {
            if let Some(p) = slot.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.year_start > self.year_end {
            return Err(Error::Config(format!(
                "empty year window {}..{}",
                self.year_start, self.year_end
            )));
        }
        for (name, v) in [
            ("link_share", self.link_share),
            ("unknown_share", self.unknown_share),
            ("min_probability", self.min_probability),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.min_publications == 0 {
            return Err(Error::Config("min_publications must be at least 1".into()));
        }
        if self.document_types.is_empty() {
            return Err(Error::Config("document_types is empty".into()));
        }
        if self.snapshot_year == 0 || self.gap_windows.contains(&0) {
            return Err(Error::Config("career years are 1-based".into()));
        }
        Ok(())
    }

    pub fn in_window(&self, year: i32) -> bool {
        (self.year_start..=self.year_end).contains(&year)
    }

    pub fn is_reported_discipline(&self, code: &str) -> bool {
        !self.report_exclude_disciplines.iter().any(|d| d == code)
    }
}

fn parse_env_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
