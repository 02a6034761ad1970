//! Corpus data model, ingest and normalized persistence.
//!
//! Input is UTF-8 JSON lines, one publication per line:
//!
//! ```text
//! {"pub_id":"p1","year":2004,"document_type":"article","source_id":"s9",
//!  "authors":[{"author_id":"a1","first_name":"Sonya F.P.","last_name":"Ivanova","countries":["ru"]}]}
//! ```
//!
//! Authors are listed in byline order. The normalized file written by
//! [`Corpus::write_jsonl`] uses the same schema, with country codes uppercased.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::countries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentType {
    Article,
    Chapter,
    ConferencePaper,
    ConferenceReview,
    Review,
    #[serde(other)]
    Other,
}

impl DocumentType {
    /// Document types that count towards careers and statistics.
    pub const COUNTED: [DocumentType; 5] = [
        DocumentType::Article,
        DocumentType::Chapter,
        DocumentType::ConferencePaper,
        DocumentType::ConferenceReview,
        DocumentType::Review,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorSlot {
    pub author_id: String,
    #[serde(rename = "first_name", default)]
    pub raw_first_name: String,
    #[serde(rename = "last_name", default)]
    pub raw_last_name: String,
    /// Affiliation countries for this byline slot, sorted and deduplicated.
    #[serde(default)]
    pub countries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    pub document_type: DocumentType,
    pub source_id: String,
    pub authors: Vec<AuthorSlot>,
}

impl PublicationRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.authors.is_empty() {
            return Err(format!("publication {} has no authors", self.pub_id));
        }
        if let Some(pos) = self
            .authors
            .iter()
            .position(|a| a.author_id.trim().is_empty())
        {
            return Err(format!(
                "publication {} has an empty author_id at position {pos}",
                self.pub_id
            ));
        }
        Ok(())
    }

    fn normalize(&mut self, unknown: &mut BTreeSet<String>) {
        for slot in &mut self.authors {
            let mut codes: Vec<String> = slot
                .countries
                .iter()
                .map(|c| countries::normalize(c))
                .filter(|c| !c.is_empty())
                .collect();
            codes.sort();
            codes.dedup();
            for c in &codes {
                if !countries::is_known(c) {
                    unknown.insert(c.clone());
                }
            }
            slot.countries = codes;
        }
    }
}

/// Keeps only records of the allowed document types, preserving order.
pub fn filter_documents(
    records: Vec<PublicationRecord>,
    allowed: &[DocumentType],
) -> Vec<PublicationRecord> {
    records
        .into_iter()
        .filter(|r| allowed.contains(&r.document_type))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Non-blank input lines.
    pub total: usize,
    pub kept: usize,
    pub dropped_document_type: usize,
    pub dropped_year_window: usize,
    pub malformed: usize,
    /// Country codes that are not ISO 3166 alpha-2; kept verbatim.
    pub unknown_countries: BTreeSet<String>,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.dropped_document_type + self.dropped_year_window
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub records: Vec<PublicationRecord>,
}

enum LineOutcome {
    Kept(PublicationRecord),
    DocumentType,
    YearWindow,
    Malformed(String),
}

impl Corpus {
    pub fn new(records: Vec<PublicationRecord>) -> Self {
        Corpus { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Parses, validates and filters a JSON-lines corpus file.
    pub fn ingest(path: &Path, config: &AnalysisConfig) -> Result<(Corpus, IngestReport)> {
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        Self::ingest_str(&text, path, config)
    }

    pub fn ingest_str(
        text: &str,
        origin: &Path,
        config: &AnalysisConfig,
    ) -> Result<(Corpus, IngestReport)> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();

        let outcomes: Vec<(usize, LineOutcome)> = lines
            .par_iter()
            .map(|&(idx, line)| (idx + 1, classify_line(line, config)))
            .collect();

        let mut report = IngestReport {
            total: lines.len(),
            ..Default::default()
        };
        let mut records = Vec::with_capacity(outcomes.len());
        for (line, outcome) in outcomes {
            match outcome {
                LineOutcome::Kept(mut rec) => {
                    rec.normalize(&mut report.unknown_countries);
                    records.push(rec);
                    report.kept += 1;
                }
                LineOutcome::DocumentType => report.dropped_document_type += 1,
                LineOutcome::YearWindow => report.dropped_year_window += 1,
                LineOutcome::Malformed(message) => {
                    if config.strict {
                        return Err(Error::Malformed {
                            path: origin.to_path_buf(),
                            line,
                            message,
                        });
                    }
                    log::warn!(
                        "{}:{line}: skipping malformed record: {message}",
                        origin.display()
                    );
                    report.malformed += 1;
                }
            }
        }
        Ok((Corpus { records }, report))
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::write(path, e))?;
        let mut out = BufWriter::new(file);
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n").map_err(|e| Error::write(path, e))?;
        }
        out.flush().map_err(|e| Error::write(path, e))
    }

    /// Loads a normalized corpus written by [`Corpus::write_jsonl`].
    pub fn read_jsonl(path: &Path) -> Result<Corpus> {
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        let records = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::Malformed {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus { records })
    }
}

fn classify_line(line: &str, config: &AnalysisConfig) -> LineOutcome {
    let rec: PublicationRecord = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => return LineOutcome::Malformed(e.to_string()),
    };
    if let Err(message) = rec.validate() {
        return LineOutcome::Malformed(message);
    }
    if !config.document_types.contains(&rec.document_type) {
        return LineOutcome::DocumentType;
    }
    if !config.in_window(rec.year) {
        return LineOutcome::YearWindow;
    }
    LineOutcome::Kept(rec)
}

/// Source to discipline mapping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classification {
    by_source: BTreeMap<String, BTreeSet<String>>,
}

impl Classification {
    pub fn from_pairs<I, S, D>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, D)>,
        S: Into<String>,
        D: Into<String>,
    {
        let mut by_source: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (s, d) in pairs {
            by_source.entry(s.into()).or_default().insert(d.into());
        }
        Classification { by_source }
    }

    pub fn disciplines(&self, source_id: &str) -> Option<&BTreeSet<String>> {
        self.by_source.get(source_id)
    }

    pub fn num_sources(&self) -> usize {
        self.by_source.len()
    }

    /// Reads a `source_id,discipline_code` CSV. Rows naming a discipline
    /// outside `allowed` are skipped with a warning.
    pub fn read_csv(path: &Path, allowed: &[String]) -> Result<Classification> {
        #[derive(Deserialize)]
        struct Row {
            source_id: String,
            discipline_code: String,
        }
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_read_error(path, e))?;
        let mut pairs = Vec::new();
        let mut skipped = 0usize;
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })?;
            let code = row.discipline_code.trim().to_string();
            if allowed.contains(&code) {
                pairs.push((row.source_id.trim().to_string(), code));
            } else {
                skipped += 1;
            }
        }
        if skipped > 0 {
            log::warn!(
                "{}: skipped {skipped} rows with disciplines outside the configured list",
                path.display()
            );
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_write_error(path, e))?;
        w.write_record(["source_id", "discipline_code"])?;
        for (s, ds) in &self.by_source {
            for d in ds {
                w.write_record([s, d])?;
            }
        }
        w.flush().map_err(|e| Error::write(path, e))
    }
}

pub(crate) fn csv_read_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::read(PathBuf::from(path), io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

pub(crate) fn csv_write_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::write(PathBuf::from(path), io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, year: i32, doc: &str) -> String {
        format!(
            r#"{{"pub_id":"{id}","year":{year},"document_type":"{doc}","source_id":"s1","authors":[{{"author_id":"a1","first_name":"Ann","last_name":"Lee","countries":["nl"]}}]}}"#
        )
    }

    fn ingest(text: &str) -> (Corpus, IngestReport) {
        Corpus::ingest_str(text, Path::new("test.jsonl"), &AnalysisConfig::default()).unwrap()
    }

    #[test]
    fn other_document_type_is_filtered() {
        let text = [
            line("p1", 2000, "article"),
            line("p2", 2001, "other"),
            line("p3", 2002, "review"),
        ]
        .join("\n");
        let (corpus, report) = ingest(&text);
        assert_eq!(report.kept, 2);
        assert_eq!(report.dropped_document_type, 1);
        assert_eq!(corpus.records[1].pub_id, "p3");
    }

    #[test]
    fn unrecognised_type_string_counts_as_other() {
        let (_, report) = ingest(&line("p1", 2000, "erratum"));
        assert_eq!(report.dropped_document_type, 1);
    }

    #[test]
    fn empty_file() {
        let (corpus, report) = ingest("");
        assert!(corpus.is_empty());
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn year_outside_window() {
        let (corpus, report) = ingest(&line("p1", 1995, "article"));
        assert!(corpus.is_empty());
        assert_eq!(report.dropped_year_window, 1);
        let (_, report) = ingest(&line("p1", 1996, "article"));
        assert_eq!(report.kept, 1);
    }

    #[test]
    fn malformed_lines_are_counted_or_fatal() {
        let text = format!(
            "{}\nnot json\n{{\"pub_id\":\"p\",\"year\":2000,\"document_type\":\"article\",\"source_id\":\"s\",\"authors\":[]}}\n",
            line("p1", 2000, "article")
        );
        let (_, report) = ingest(&text);
        assert_eq!((report.kept, report.malformed, report.total), (1, 2, 3));

        let strict = AnalysisConfig {
            strict: true,
            ..Default::default()
        };
        let err = Corpus::ingest_str(&text, Path::new("c.jsonl"), &strict).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
    }

    #[test]
    fn countries_are_normalized_and_unknowns_reported() {
        let text = r#"{"pub_id":"p","year":2000,"document_type":"article","source_id":"s","authors":[{"author_id":"a","first_name":"","last_name":"x","countries":["nl"," de","NL","zz"]}]}"#;
        let (corpus, report) = ingest(text);
        assert_eq!(
            corpus.records[0].authors[0].countries,
            vec!["DE", "NL", "ZZ"]
        );
        assert_eq!(
            report.unknown_countries.into_iter().collect::<Vec<_>>(),
            vec!["ZZ"]
        );
    }

    #[test]
    fn missing_first_name_is_kept() {
        let text = r#"{"pub_id":"p","year":2000,"document_type":"article","source_id":"s","authors":[{"author_id":"a","last_name":"x"}]}"#;
        let (corpus, _) = ingest(text);
        assert_eq!(corpus.records[0].authors[0].raw_first_name, "");
    }

    #[test]
    fn filter_documents_enumeration() {
        let rec = |t| PublicationRecord {
            pub_id: String::new(),
            year: 2000,
            document_type: t,
            source_id: String::new(),
            authors: vec![],
        };
        let counted = DocumentType::COUNTED;
        let kept = filter_documents(
            vec![rec(DocumentType::Article), rec(DocumentType::Review)],
            &counted,
        );
        assert_eq!(kept.len(), 2);
        assert!(filter_documents(vec![rec(DocumentType::Other)], &counted).is_empty());

        let mut mixed: Vec<_> = counted.iter().map(|&t| rec(t)).collect();
        mixed.insert(2, rec(DocumentType::Other));
        mixed.push(rec(DocumentType::Other));
        let kept = filter_documents(mixed, &counted);
        assert_eq!(
            kept.iter().map(|r| r.document_type).collect::<Vec<_>>(),
            counted.to_vec()
        );
    }
}
