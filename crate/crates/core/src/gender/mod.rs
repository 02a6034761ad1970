//! Name-based gender inference.
//!
//! Five steps per author:
//!
//! 1. countries of origin from affiliation history ([`determine_countries_of_origin`]);
//! 2. first-name lookups against three offline providers, resolved by a fixed
//!    rule cascade ([`cascade`]), once per country of origin;
//! 3. last-name suffix rules for countries where surnames carry gender ([`lastname`]);
//! 4. for authors still without any inference, agreement among other-country
//!    authors sharing a first name ([`NameIndex`]);
//! 5. per-country results combined by unanimity ([`combine_step5`]).
//!
//! The three providers play distinct roles: a counted dictionary queried with
//! country (`primary`), a categorical guesser queried with and without
//! country (`guesser`), and a second counted dictionary (`fallback`).

pub mod cascade;
mod infer;
pub mod lastname;
pub mod provider;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cascade::{run_cascade, Responses, Rule, Thresholds};
pub use infer::{
    combine_step5, determine_countries_of_origin, infer_profiles, infer_step2,
    infer_step3_lastname, infer_step4_cross_country, read_profiles, write_profiles, NameIndex,
};
pub use lastname::LastNameTables;
pub use provider::{NameDictionary, ProviderGender, ProviderResponse, ProviderRole, Providers};

use crate::names::CleanedNameSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderLabel {
    Male,
    Female,
    Unknown,
    NoInference,
}

impl GenderLabel {
    pub fn is_resolved(self) -> bool {
        matches!(self, GenderLabel::Male | GenderLabel::Female)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GenderLabel::Male => "male",
            GenderLabel::Female => "female",
            GenderLabel::Unknown => "unknown",
            GenderLabel::NoInference => "no_inference",
        }
    }

    /// Reporting group: `unknown` and `no_inference` are both unknown gender.
    pub fn group(self) -> GenderLabel {
        match self {
            GenderLabel::NoInference => GenderLabel::Unknown,
            g => g,
        }
    }

    pub fn swapped(self) -> GenderLabel {
        match self {
            GenderLabel::Male => GenderLabel::Female,
            GenderLabel::Female => GenderLabel::Male,
            g => g,
        }
    }
}

impl fmt::Display for GenderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which step (and cascade rule) decided a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "step2-rule1")]
    Step2Rule1,
    #[serde(rename = "step2-rule2")]
    Step2Rule2,
    #[serde(rename = "step2-rule3")]
    Step2Rule3,
    #[serde(rename = "step2-rule4")]
    Step2Rule4,
    #[serde(rename = "step2-unknown")]
    Step2Unknown,
    #[serde(rename = "step2-none")]
    Step2None,
    #[serde(rename = "step3")]
    Step3,
    #[serde(rename = "step4")]
    Step4,
    #[serde(rename = "step4-unknown")]
    Step4Unknown,
    #[serde(rename = "step5-conflict")]
    Step5Conflict,
}

impl Provenance {
    pub fn from_rule(rule: Rule) -> Provenance {
        match rule {
            Rule::R1 => Provenance::Step2Rule1,
            Rule::R2 => Provenance::Step2Rule2,
            Rule::R3 => Provenance::Step2Rule3,
            Rule::R4 => Provenance::Step2Rule4,
            Rule::R5 => Provenance::Step2Unknown,
            Rule::R6 => Provenance::Step2None,
        }
    }
}

/// Countries used for the per-country lookups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Countries(Vec<String>),
    /// No affiliation country on any publication; lookups are country-independent.
    Unresolvable,
}

impl Origin {
    pub fn lookup_countries(&self) -> Vec<Option<&str>> {
        match self {
            Origin::Countries(cs) => cs.iter().map(|c| Some(c.as_str())).collect(),
            Origin::Unresolvable => vec![None],
        }
    }

    pub fn contains(&self, country: &str) -> bool {
        matches!(self, Origin::Countries(cs) if cs.iter().any(|c| c == country))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryResult {
    pub country: Option<String>,
    pub gender: GenderLabel,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub author_id: String,
    pub first_name: String,
    pub last_name: String,
    pub candidates: Vec<String>,
    pub origin: Origin,
    pub per_country: Vec<CountryResult>,
    pub gender: GenderLabel,
    pub provenance: Provenance,
}

impl AuthorProfile {
    pub fn names(&self) -> CleanedNameSet {
        CleanedNameSet {
            original: self.first_name.clone(),
            candidates: self.candidates.clone(),
        }
    }
}
