//! Cohort statistics and the per-figure CSV tables.
//!
//! Every table shares one CSV schema:
//!
//! ```text
//! statistic,cohort,gender,discipline,country,career_year,value,ci_lo,ci_hi,n
//! ```
//!
//! Columns that do not apply to a row are left empty. `n` is the denominator
//! behind `value`: cohort members for shares, active members for hazards and
//! means, publications for authorship-position probabilities.

pub mod cohort;
mod figures;
mod interval;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use cohort::{
    active_after, attrition_hazard, career_gaps, ended_within, gap_runs, mean_productivity,
    position_counts, weighted_relative_gap, Cohort, CompensatedSum, Counting,
};
pub use figures::{career_start_shares, compute_figures, Breakdown, StatsMeta, FIGURE_IDS};
pub use interval::{proportion_interval, Z95};

use crate::corpus::{csv_read_error, csv_write_error};
use crate::error::{Error, Result};
use crate::gender::GenderLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortRow {
    pub statistic: String,
    pub cohort: Option<i32>,
    pub gender: Option<GenderLabel>,
    pub discipline: Option<String>,
    pub country: Option<String>,
    pub career_year: Option<u32>,
    pub value: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub n: u64,
}

impl CohortRow {
    pub fn new(statistic: impl Into<String>, value: f64, n: u64) -> Self {
        CohortRow {
            statistic: statistic.into(),
            cohort: None,
            gender: None,
            discipline: None,
            country: None,
            career_year: None,
            value,
            ci_lo: None,
            ci_hi: None,
            n,
        }
    }

    pub fn cohort(mut self, year: i32) -> Self {
        self.cohort = Some(year);
        self
    }

    pub fn gender(mut self, g: GenderLabel) -> Self {
        self.gender = Some(g);
        self
    }

    pub fn discipline(mut self, d: &str) -> Self {
        self.discipline = Some(d.to_string());
        self
    }

    pub fn country(mut self, c: &str) -> Self {
        self.country = Some(c.to_string());
        self
    }

    pub fn career_year(mut self, y: u32) -> Self {
        self.career_year = Some(y);
        self
    }

    pub fn interval(mut self, ci: Option<(f64, f64)>) -> Self {
        if let Some((lo, hi)) = ci {
            self.ci_lo = Some(lo);
            self.ci_hi = Some(hi);
        }
        self
    }

    /// Identifying columns, joined; unique within a table.
    pub fn key(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        [
            self.statistic.clone(),
            opt(&self.cohort),
            self.gender
                .map(|g| g.as_str().to_string())
                .unwrap_or_default(),
            opt(&self.discipline),
            opt(&self.country),
            opt(&self.career_year),
        ]
        .join("|")
    }
}

/// One emitted table, named after the figure it backs (`fig01` ... `figB1`).
#[derive(Debug, Clone, PartialEq)]
pub struct CohortTable {
    pub id: String,
    pub rows: Vec<CohortRow>,
}

impl CohortTable {
    pub fn file_name(&self) -> String {
        format!("{}.csv", self.id)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_rows(&self.rows, path)
    }

    pub fn read_csv(id: &str, path: &Path) -> Result<Self> {
        Ok(CohortTable {
            id: id.to_string(),
            rows: read_rows(path)?,
        })
    }
}

pub fn write_rows(rows: &[CohortRow], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_write_error(path, e))?;
    w.write_record([
        "statistic",
        "cohort",
        "gender",
        "discipline",
        "country",
        "career_year",
        "value",
        "ci_lo",
        "ci_hi",
        "n",
    ])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::write(path, e))
}

pub fn read_rows(path: &Path) -> Result<Vec<CohortRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_read_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
