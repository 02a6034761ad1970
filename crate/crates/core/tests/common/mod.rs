//! Shared test helpers and a brute-force recomputation of every cohort table.
//!
//! The oracle works straight from the ingested corpus, the inferred profiles
//! and the classification. It shares only data types with the library: no
//! career building, linking, eligibility or statistics code is reused.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use pubcareers::corpus::PublicationRecord;
use pubcareers::gender::GenderLabel;
use pubcareers::AnalysisConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub ci: Option<(f64, f64)>,
    pub n: u64,
    /// Proportions must match bit for bit; means within a tolerance.
    pub exact: bool,
}

pub type Tables = BTreeMap<String, BTreeMap<String, Cell>>;

struct Career {
    start: i32,
    end: i32,
    full: Vec<u32>,
    frac: Vec<Vec<f64>>,
    first: Vec<u32>,
    last: Vec<u32>,
    disciplines: BTreeSet<String>,
    countries: BTreeSet<String>,
    gender: char,
}

impl Career {
    fn len(&self) -> u32 {
        (self.end - self.start + 1) as u32
    }
}

fn key(
    stat: &str,
    cohort: Option<i32>,
    gender: Option<char>,
    disc: &str,
    country: &str,
    year: Option<u32>,
) -> String {
    let g = match gender {
        Some('m') => "male",
        Some('f') => "female",
        Some(_) => "unknown",
        None => "",
    };
    format!(
        "{stat}|{}|{g}|{disc}|{country}|{}",
        cohort.map(|c| c.to_string()).unwrap_or_default(),
        year.map(|y| y.to_string()).unwrap_or_default()
    )
}

/// Wilson interval from the roots of (p̂ - p)² = z² p (1 - p) / n.
pub fn wilson(s: u64, n: u64) -> (f64, f64) {
    let z = 1.959963984540054f64;
    let (sf, nf) = (s as f64, n as f64);
    let ph = sf / nf;
    let k = z * z / nf;
    let a = 1.0 + k;
    let b = -(2.0 * ph + k);
    let c = ph * ph;
    let d = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let lo = if s == 0 { 0.0 } else { (-b - d) / (2.0 * a) };
    let hi = if s == n { 1.0 } else { (-b + d) / (2.0 * a) };
    (lo, hi)
}

fn share_linked(items: &[Vec<String>], share: f64) -> BTreeSet<String> {
    let n = items.len();
    let mut all: BTreeSet<&String> = BTreeSet::new();
    for set in items {
        all.extend(set.iter());
    }
    all.into_iter()
        .filter(|item| {
            let hits = items.iter().filter(|s| s.contains(item)).count();
            hits as f64 / n as f64 >= share
        })
        .cloned()
        .collect()
}

fn add(
    t: &mut BTreeMap<String, Cell>,
    k: String,
    value: f64,
    ci: Option<(f64, f64)>,
    n: u64,
    exact: bool,
) {
    assert!(
        t.insert(
            k.clone(),
            Cell {
                value,
                ci,
                n,
                exact
            }
        )
        .is_none(),
        "duplicate oracle key {k}"
    );
}

pub fn brute_force(
    records: &[PublicationRecord],
    genders: &HashMap<String, GenderLabel>,
    classification: &HashMap<String, Vec<String>>,
    cfg: &AnalysisConfig,
) -> Tables {
    // author -> (record, slot), first slot per record
    let mut slots: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for (r, rec) in records.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for (s, a) in rec.authors.iter().enumerate() {
            if seen.insert(a.author_id.as_str()) {
                slots.entry(a.author_id.as_str()).or_default().push((r, s));
            }
        }
    }

    let mut careers = Vec::new();
    for (id, list) in &slots {
        if list.len() < cfg.min_publications {
            continue;
        }
        let start = list.iter().map(|&(r, _)| records[r].year).min().unwrap();
        let end = list.iter().map(|&(r, _)| records[r].year).max().unwrap();
        let len = (end - start + 1) as usize;
        let mut c = Career {
            start,
            end,
            full: vec![0; len],
            frac: vec![Vec::new(); len],
            first: vec![0; len],
            last: vec![0; len],
            disciplines: BTreeSet::new(),
            countries: BTreeSet::new(),
            gender: match genders
                .get(*id)
                .copied()
                .unwrap_or(GenderLabel::NoInference)
            {
                GenderLabel::Male => 'm',
                GenderLabel::Female => 'f',
                _ => 'u',
            },
        };
        let mut discs = Vec::new();
        let mut ctrs = Vec::new();
        for &(r, s) in list {
            let rec = &records[r];
            let y = (rec.year - start) as usize;
            let n = rec.authors.len();
            c.full[y] += 1;
            c.frac[y].push(1.0 / n as f64);
            if n > 1 && s == 0 {
                c.first[y] += 1;
            }
            if n > 1 && s == n - 1 {
                c.last[y] += 1;
            }
            discs.push(
                classification
                    .get(&rec.source_id)
                    .cloned()
                    .unwrap_or_default(),
            );
            ctrs.push(rec.authors[s].countries.clone());
        }
        c.disciplines = share_linked(&discs, cfg.link_share);
        c.countries = share_linked(&ctrs, cfg.link_share);
        careers.push(c);
    }

    // eligibility
    let mut per_country: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for c in &careers {
        for k in &c.countries {
            let e = per_country.entry(k.as_str()).or_default();
            e.0 += 1;
            if c.gender == 'u' {
                e.1 += 1;
            }
        }
    }
    let eligible: Vec<String> = per_country
        .iter()
        .filter(|(_, (n, u))| *u as f64 / *n as f64 <= cfg.unknown_share)
        .map(|(k, _)| k.to_string())
        .collect();
    let general: Vec<&Career> = careers
        .iter()
        .filter(|c| c.countries.iter().any(|k| eligible.contains(k)))
        .collect();
    let resolved: Vec<&Career> = general
        .iter()
        .copied()
        .filter(|c| c.gender != 'u')
        .collect();
    let disciplines: Vec<&String> = cfg
        .disciplines
        .iter()
        .filter(|d| !cfg.report_exclude_disciplines.contains(d))
        .collect();
    let members = |start: i32, g: char| -> Vec<&Career> {
        resolved
            .iter()
            .copied()
            .filter(|c| c.start == start && c.gender == g)
            .collect()
    };
    let max_year = |start: i32| (cfg.year_end - start + 1).max(0) as u32;

    let mut out = Tables::new();

    // fig01
    let t = out.entry("fig01".into()).or_default();
    for year in cfg.year_start..=cfg.year_end {
        let cohort: Vec<&Career> = general
            .iter()
            .copied()
            .filter(|c| c.start == year)
            .collect();
        let count = |g: char| cohort.iter().filter(|c| c.gender == g).count() as u64;
        let (m, f, u) = (count('m'), count('f'), count('u'));
        if m + f + u > 0 {
            for (g, k) in [('m', m), ('f', f), ('u', u)] {
                add(
                    t,
                    key(
                        "start_share_incl_unknown",
                        Some(year),
                        Some(g),
                        "",
                        "",
                        None,
                    ),
                    k as f64 / (m + f + u) as f64,
                    None,
                    m + f + u,
                    true,
                );
            }
        }
        if m + f > 0 {
            for (g, k) in [('m', m), ('f', f)] {
                add(
                    t,
                    key("start_share", Some(year), Some(g), "", "", None),
                    k as f64 / (m + f) as f64,
                    None,
                    m + f,
                    true,
                );
            }
        }
    }

    // fig02, fig03
    let t = out.entry("fig02".into()).or_default();
    for &year in &cfg.discipline_cohorts {
        for d in &disciplines {
            let m = members(year, 'm')
                .iter()
                .filter(|c| c.disciplines.contains(*d))
                .count() as u64;
            let f = members(year, 'f')
                .iter()
                .filter(|c| c.disciplines.contains(*d))
                .count() as u64;
            if m + f > 0 {
                for (g, k) in [('m', m), ('f', f)] {
                    add(
                        t,
                        key("start_share", Some(year), Some(g), d, "", None),
                        k as f64 / (m + f) as f64,
                        Some(wilson(k, m + f)),
                        m + f,
                        true,
                    );
                }
            }
        }
    }
    let t = out.entry("fig03".into()).or_default();
    let year = cfg.country_cohort;
    for k in &eligible {
        let m = members(year, 'm')
            .iter()
            .filter(|c| c.countries.contains(k))
            .count() as u64;
        let f = members(year, 'f')
            .iter()
            .filter(|c| c.countries.contains(k))
            .count() as u64;
        if m + f > 0 {
            for (g, n) in [('m', m), ('f', f)] {
                add(
                    t,
                    key("start_share", Some(year), Some(g), "", k, None),
                    n as f64 / (m + f) as f64,
                    None,
                    m + f,
                    true,
                );
            }
        }
    }

    // fig04
    let t = out.entry("fig04".into()).or_default();
    for &start in &cfg.cohort_years {
        for g in ['m', 'f'] {
            let ms = members(start, g);
            for y in 1..=max_year(start).saturating_sub(2) {
                let active = ms.iter().filter(|c| c.end >= start + y as i32).count() as u64;
                let next = ms.iter().filter(|c| c.end > start + y as i32).count() as u64;
                if active > 0 {
                    add(
                        t,
                        key("hazard", Some(start), Some(g), "", "", Some(y)),
                        (active - next) as f64 / active as f64,
                        None,
                        active,
                        true,
                    );
                }
            }
        }
    }

    // fig05
    let t = out.entry("fig05".into()).or_default();
    let stat = format!("ended_within_{}", cfg.ended_horizon);
    for &start in &cfg.discipline_cohorts {
        for d in &disciplines {
            for g in ['m', 'f'] {
                let ms: Vec<&Career> = members(start, g)
                    .into_iter()
                    .filter(|c| c.disciplines.contains(*d))
                    .collect();
                if !ms.is_empty() {
                    let ended = ms.iter().filter(|c| c.len() <= cfg.ended_horizon).count() as u64;
                    let n = ms.len() as u64;
                    add(
                        t,
                        key(&stat, Some(start), Some(g), d, "", None),
                        ended as f64 / n as f64,
                        Some(wilson(ended, n)),
                        n,
                        true,
                    );
                }
            }
        }
    }

    let mean_at = |ms: &[&Career], y: u32, fractional: bool| -> Option<(f64, u64)> {
        let active: Vec<&&Career> = ms.iter().filter(|c| c.len() >= y).collect();
        if active.is_empty() {
            return None;
        }
        let i = (y - 1) as usize;
        let total: f64 = if fractional {
            active.iter().map(|c| c.frac[i].iter().sum::<f64>()).sum()
        } else {
            active.iter().map(|c| c.full[i] as f64).sum()
        };
        Some((total / active.len() as f64, active.len() as u64))
    };

    // fig06
    let t = out.entry("fig06".into()).or_default();
    for (name, fractional) in [
        ("productivity_full", false),
        ("productivity_fractional", true),
    ] {
        for &start in &cfg.cohort_years {
            for g in ['m', 'f'] {
                let ms = members(start, g);
                for y in 1..=max_year(start) {
                    if let Some((v, n)) = mean_at(&ms, y, fractional) {
                        add(
                            t,
                            key(name, Some(start), Some(g), "", "", Some(y)),
                            v,
                            None,
                            n,
                            !fractional,
                        );
                    }
                }
            }
        }
    }

    // fig07, fig08
    for (fig, name, fractional) in [
        ("fig07", "productivity_full", false),
        ("fig08", "productivity_fractional", true),
    ] {
        let t = out.entry(fig.into()).or_default();
        let y = cfg.snapshot_year;
        for &start in &cfg.discipline_cohorts {
            let (mut num, mut den) = (0.0, 0u64);
            for d in &disciplines {
                let pair: Vec<Option<(f64, u64)>> = ['m', 'f']
                    .iter()
                    .map(|&g| {
                        let ms: Vec<&Career> = members(start, g)
                            .into_iter()
                            .filter(|c| c.disciplines.contains(*d))
                            .collect();
                        mean_at(&ms, y, fractional)
                    })
                    .collect();
                for (g, r) in ['m', 'f'].iter().zip(&pair) {
                    if let Some((v, n)) = r {
                        add(
                            t,
                            key(name, Some(start), Some(*g), d, "", Some(y)),
                            *v,
                            None,
                            *n,
                            false,
                        );
                    }
                }
                if let (Some((m, nm)), Some((f, nf))) = (pair[0], pair[1]) {
                    if f > 0.0 {
                        num += (nm + nf) as f64 * (m / f - 1.0);
                        den += nm + nf;
                    }
                }
            }
            if den > 0 {
                add(
                    t,
                    key(
                        &format!("{name}_weighted_gap"),
                        Some(start),
                        None,
                        "",
                        "",
                        Some(y),
                    ),
                    num / den as f64,
                    None,
                    den,
                    false,
                );
            }
        }
    }

    let position_at = |ms: &[&Career], y: u32, first: bool| -> Option<(u64, u64)> {
        let i = (y - 1) as usize;
        let mut hits = 0u64;
        let mut total = 0u64;
        for c in ms.iter().filter(|c| c.len() >= y) {
            hits += if first { c.first[i] } else { c.last[i] } as u64;
            total += c.full[i] as u64;
        }
        (total > 0).then_some((hits, total))
    };

    // fig09
    let t = out.entry("fig09".into()).or_default();
    for (name, first) in [("first_author_prob", true), ("last_author_prob", false)] {
        for &start in &cfg.cohort_years {
            for g in ['m', 'f'] {
                let ms = members(start, g);
                for y in 1..=max_year(start) {
                    if let Some((h, n)) = position_at(&ms, y, first) {
                        add(
                            t,
                            key(name, Some(start), Some(g), "", "", Some(y)),
                            h as f64 / n as f64,
                            None,
                            n,
                            true,
                        );
                    }
                }
            }
        }
    }

    // fig10, fig11
    for (fig, name, first) in [
        ("fig10", "first_author_prob", true),
        ("fig11", "last_author_prob", false),
    ] {
        let t = out.entry(fig.into()).or_default();
        let y = cfg.snapshot_year;
        for &start in &cfg.discipline_cohorts {
            for d in &disciplines {
                for g in ['m', 'f'] {
                    let ms: Vec<&Career> = members(start, g)
                        .into_iter()
                        .filter(|c| c.disciplines.contains(*d))
                        .collect();
                    if let Some((h, n)) = position_at(&ms, y, first) {
                        add(
                            t,
                            key(name, Some(start), Some(g), d, "", Some(y)),
                            h as f64 / n as f64,
                            Some(wilson(h, n)),
                            n,
                            true,
                        );
                    }
                }
            }
        }
    }

    // figB1
    let t = out.entry("figB1".into()).or_default();
    for &start in &cfg.cohort_years {
        for &w in &cfg.gap_windows {
            if w == 0 || w > max_year(start) {
                continue;
            }
            for g in ['m', 'f'] {
                let ms: Vec<&Career> = members(start, g)
                    .into_iter()
                    .filter(|c| c.len() >= w)
                    .collect();
                if ms.is_empty() {
                    continue;
                }
                let mut tally = vec![0u64; w as usize + 1];
                for c in &ms {
                    let mut run = 0usize;
                    for i in 0..w as usize {
                        if c.full[i] == 0 {
                            run += 1;
                        } else {
                            tally[run] += (run > 0) as u64;
                            run = 0;
                        }
                    }
                    tally[run] += (run > 0) as u64;
                }
                for (len, &count) in tally.iter().enumerate().take(w as usize).skip(1) {
                    add(
                        t,
                        key(
                            &format!("gap_len_{len}"),
                            Some(start),
                            Some(g),
                            "",
                            "",
                            Some(w),
                        ),
                        count as f64 / ms.len() as f64,
                        None,
                        ms.len() as u64,
                        true,
                    );
                }
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct Comparison {
    pub cells: usize,
    pub mismatches: Vec<String>,
}

/// Compares the tables written to `run` against the oracle, cell by cell.
pub fn compare_with_run(run: &Path, oracle: &Tables) -> Comparison {
    let mut cmp = Comparison::default();
    for (fig, expected) in oracle {
        let rows =
            pubcareers::stats::read_rows(&run.join(format!("{fig}.csv"))).expect("figure csv");
        let mut seen = BTreeSet::new();
        for row in &rows {
            let k = row.key();
            seen.insert(k.clone());
            let Some(cell) = expected.get(&k) else {
                cmp.mismatches.push(format!("{fig}: unexpected row {k}"));
                continue;
            };
            cmp.cells += 1;
            let value_ok = if cell.exact {
                row.value.to_bits() == cell.value.to_bits()
            } else {
                (row.value - cell.value).abs() <= 1e-9
            };
            let ci_ok = match (cell.ci, row.ci_lo.zip(row.ci_hi)) {
                (None, None) => true,
                (Some((a, b)), Some((c, d))) => (a - c).abs() <= 1e-9 && (b - d).abs() <= 1e-9,
                _ => false,
            };
            if !value_ok || !ci_ok || row.n != cell.n {
                cmp.mismatches.push(format!(
                    "{fig} {k}: got {} [{:?},{:?}] n={}, oracle {} {:?} n={}",
                    row.value, row.ci_lo, row.ci_hi, row.n, cell.value, cell.ci, cell.n
                ));
            }
        }
        for k in expected.keys().filter(|k| !seen.contains(*k)) {
            cmp.mismatches.push(format!("{fig}: missing row {k}"));
        }
    }
    cmp
}

/// Loads the ingested corpus, profiles and classification from a run
/// directory and recomputes every table.
pub fn oracle_for_run(run: &Path, cfg: &AnalysisConfig) -> Tables {
    let corpus = pubcareers::corpus::Corpus::read_jsonl(&run.join("corpus.jsonl")).unwrap();
    let profiles = pubcareers::gender::read_profiles(&run.join("profiles.jsonl")).unwrap();
    let genders = profiles
        .into_iter()
        .map(|p| (p.author_id, p.gender))
        .collect();
    let mut classification: HashMap<String, Vec<String>> = HashMap::new();
    let mut reader = csv::Reader::from_path(run.join("classification.csv")).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        classification
            .entry(rec[0].to_string())
            .or_default()
            .push(rec[1].to_string());
    }
    brute_force(&corpus.records, &genders, &classification, cfg)
}

/// Runs every stage on a synthetic dataset written to `dir/synthetic`,
/// writing artifacts to `dir/run`. Returns the loaded config.
pub fn run_synthetic(
    spec: &pubcareers::validation::SynthSpec,
    dir: &Path,
    threads: usize,
) -> (pubcareers::validation::SyntheticDataset, AnalysisConfig) {
    let data = pubcareers::validation::generate_corpus(spec).unwrap();
    let config_path = data.write(&dir.join("synthetic")).unwrap();
    let mut cfg = AnalysisConfig::load(&config_path).unwrap();
    cfg.threads = threads;
    pubcareers::pipeline::run(pubcareers::pipeline::Stage::All, &cfg, &dir.join("run")).unwrap();
    (data, cfg)
}
