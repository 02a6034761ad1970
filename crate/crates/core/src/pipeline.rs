//! Batch stages over a run directory.
//!
//! Each stage reads the artifacts of earlier stages from the run directory
//! and writes its own:
//!
//! | stage           | reads                                   | writes                                             |
//! |-----------------|-----------------------------------------|----------------------------------------------------|
//! | `ingest`        | configured corpus and classification    | `corpus.jsonl`, `classification.csv`, `ingest_report.json` |
//! | `infer-gender`  | `corpus.jsonl`, configured dictionaries | `profiles.jsonl`                                   |
//! | `build-careers` | `corpus.jsonl`, `classification.csv`, `profiles.jsonl` | `careers.jsonl`, `eligibility.csv`, `careers_report.json` |
//! | `stats`         | `careers.jsonl`, `eligibility.csv`      | `fig01.csv` ... `fig11.csv`, `figB1.csv`, `stats_meta.json` |
//! | `evaluate`      | `careers.jsonl`, `eligibility.csv`, configured labels | `confusion.csv`, `evaluation.json`   |
//! | `gen-synthetic` | optional synthetic spec                 | `synthetic/`                                       |

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::careers::{
    build_careers, compute_eligibility, read_careers, write_careers, EligibilitySet,
};
use crate::config::AnalysisConfig;
use crate::corpus::{Classification, Corpus};
use crate::error::{Error, Result};
use crate::gender::{
    infer_profiles, read_profiles, write_profiles, LastNameTables, NameDictionary, ProviderRole,
    Providers,
};
use crate::stats::compute_figures;
use crate::validation::{evaluate_inference, generate_corpus, read_labels, SynthSpec};

pub const CORPUS: &str = "corpus.jsonl";
pub const CLASSIFICATION: &str = "classification.csv";
pub const INGEST_REPORT: &str = "ingest_report.json";
pub const PROFILES: &str = "profiles.jsonl";
pub const CAREERS: &str = "careers.jsonl";
pub const ELIGIBILITY: &str = "eligibility.csv";
pub const CAREERS_REPORT: &str = "careers_report.json";
pub const STATS_META: &str = "stats_meta.json";
pub const CONFUSION: &str = "confusion.csv";
pub const EVALUATION: &str = "evaluation.json";
pub const SYNTHETIC_DIR: &str = "synthetic";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    InferGender,
    BuildCareers,
    Stats,
    Evaluate,
    GenSynthetic,
    All,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::InferGender => "infer-gender",
            Stage::BuildCareers => "build-careers",
            Stage::Stats => "stats",
            Stage::Evaluate => "evaluate",
            Stage::GenSynthetic => "gen-synthetic",
            Stage::All => "all",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Stage::Ingest,
            Stage::InferGender,
            Stage::BuildCareers,
            Stage::Stats,
            Stage::Evaluate,
            Stage::GenSynthetic,
            Stage::All,
        ]
        .into_iter()
        .find(|st| st.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// Runs one stage (or `all`) on a rayon pool sized by `config.threads`.
pub fn run(stage: Stage, config: &AnalysisConfig, out: &Path) -> Result<()> {
    config.validate()?;
    fs::create_dir_all(out).map_err(|e| Error::write(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| {
            Error::Config(format!(
                "cannot start {} worker threads: {e}",
                config.threads
            ))
        })?;
    pool.install(|| match stage {
        Stage::Ingest => ingest(config, out),
        Stage::InferGender => infer_gender(config, out),
        Stage::BuildCareers => careers(config, out),
        Stage::Stats => stats(config, out),
        Stage::Evaluate => evaluate(config, out),
        Stage::GenSynthetic => gen_synthetic(config, out).map(|_| ()),
        Stage::All => {
            ingest(config, out)?;
            infer_gender(config, out)?;
            careers(config, out)?;
            stats(config, out)?;
            if config.labels_path.is_some() {
                evaluate(config, out)?;
            } else {
                log::info!("no labels_path configured; skipping evaluate");
            }
            Ok(())
        }
    })
}

fn require(out: &Path, file: &str, stage: &'static str) -> Result<PathBuf> {
    let path = out.join(file);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact { stage, path })
    }
}

fn configured<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("`{key}` is not set")))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::write(path, e))
}

pub fn ingest(config: &AnalysisConfig, out: &Path) -> Result<()> {
    let corpus_path = configured(&config.corpus_path, "corpus_path")?;
    let class_path = configured(&config.classification_path, "classification_path")?;
    let (corpus, report) = Corpus::ingest(corpus_path, config)?;
    let classification = Classification::read_csv(class_path, &config.disciplines)?;
    log::info!(
        "ingest: kept {} of {} records ({} malformed)",
        report.kept,
        report.total,
        report.malformed
    );
    corpus.write_jsonl(&out.join(CORPUS))?;
    classification.write_csv(&out.join(CLASSIFICATION))?;
    write_json(&report, &out.join(INGEST_REPORT))
}

fn dictionary(
    path: &Option<PathBuf>,
    role: ProviderRole,
    config: &AnalysisConfig,
    key: &str,
) -> Result<NameDictionary> {
    match path {
        Some(p) => NameDictionary::read_csv(p, role, config.ascii_fold),
        None => {
            log::warn!("`{key}` is not set; that dictionary is empty");
            Ok(NameDictionary::new())
        }
    }
}

pub fn load_providers(config: &AnalysisConfig) -> Result<Providers> {
    Ok(Providers {
        primary: dictionary(
            &config.primary_provider_path,
            ProviderRole::Counted,
            config,
            "primary_provider_path",
        )?,
        guesser: dictionary(
            &config.guesser_provider_path,
            ProviderRole::Categorical,
            config,
            "guesser_provider_path",
        )?,
        fallback: dictionary(
            &config.fallback_provider_path,
            ProviderRole::Counted,
            config,
            "fallback_provider_path",
        )?,
    })
}

pub fn infer_gender(config: &AnalysisConfig, out: &Path) -> Result<()> {
    let corpus = Corpus::read_jsonl(&require(out, CORPUS, "ingest")?)?;
    let providers = load_providers(config)?;
    let lastnames = match &config.lastname_path {
        Some(p) => LastNameTables::read_csv(p)?,
        None => LastNameTables::new(),
    };
    let profiles = infer_profiles(&corpus, &providers, &lastnames, config);
    log::info!("infer-gender: {} author profiles", profiles.len());
    write_profiles(&profiles, &out.join(PROFILES))
}

pub fn careers(config: &AnalysisConfig, out: &Path) -> Result<()> {
    let corpus = Corpus::read_jsonl(&require(out, CORPUS, "ingest")?)?;
    let classification = Classification::read_csv(
        &require(out, CLASSIFICATION, "ingest")?,
        &config.disciplines,
    )?;
    let profiles = read_profiles(&require(out, PROFILES, "infer-gender")?)?;
    let (careers, report) = build_careers(&corpus, &profiles, &classification, config);
    let eligibility = compute_eligibility(&careers, config.unknown_share);
    log::info!(
        "build-careers: {} careers, {} eligible countries",
        careers.len(),
        eligibility.eligible_countries().count()
    );
    write_careers(&careers, &out.join(CAREERS))?;
    eligibility.write_csv(&out.join(ELIGIBILITY))?;
    write_json(&report, &out.join(CAREERS_REPORT))
}

pub fn stats(config: &AnalysisConfig, out: &Path) -> Result<()> {
    let careers = read_careers(&require(out, CAREERS, "build-careers")?)?;
    let eligibility = EligibilitySet::read_csv(&require(out, ELIGIBILITY, "build-careers")?)?;
    let (tables, meta) = compute_figures(&careers, &eligibility, config);
    for table in &tables {
        table.write_csv(&out.join(table.file_name()))?;
    }
    write_json(&meta, &out.join(STATS_META))
}

#[derive(Serialize)]
struct EvaluationSummary {
    labels: usize,
    scored: u64,
    uncovered: u64,
}

pub fn evaluate(config: &AnalysisConfig, out: &Path) -> Result<()> {
    let labels = read_labels(configured(&config.labels_path, "labels_path")?)?;
    let careers = read_careers(&require(out, CAREERS, "build-careers")?)?;
    let eligibility = EligibilitySet::read_csv(&require(out, ELIGIBILITY, "build-careers")?)?;
    let table = evaluate_inference(&labels, &careers, &eligibility);
    log::info!("evaluate:\n{table}");
    table.write_csv(&out.join(CONFUSION))?;
    write_json(
        &EvaluationSummary {
            labels: labels.len(),
            scored: table.scored(),
            uncovered: table.uncovered,
        },
        &out.join(EVALUATION),
    )
}

/// Writes a synthetic dataset to `out/synthetic`; the generator seed comes
/// from the configuration. Returns the dataset's config path.
pub fn gen_synthetic(config: &AnalysisConfig, out: &Path) -> Result<PathBuf> {
    let mut spec = match &config.synth_spec_path {
        Some(p) => SynthSpec::load(p)?,
        None => SynthSpec::default(),
    };
    spec.seed = config.seed;
    let data = generate_corpus(&spec)?;
    log::info!(
        "gen-synthetic: {} records, {} career authors",
        data.records.len(),
        data.plan.len()
    );
    data.write(&out.join(SYNTHETIC_DIR))
}
