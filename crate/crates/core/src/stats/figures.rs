use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cohort::{
    attrition_hazard, career_gaps, ended_within, mean_productivity, position_counts,
    weighted_relative_gap, Cohort, Counting,
};
use super::interval::proportion_interval;
use super::{CohortRow, CohortTable};
use crate::careers::{AuthorCareer, EligibilitySet, Position};
use crate::config::AnalysisConfig;
use crate::gender::GenderLabel;

/// A named sub-population filter.
type Group<'a> = (Option<&'a str>, Box<dyn Fn(&AuthorCareer) -> bool + 'a>);

pub const FIGURE_IDS: [&str; 12] = [
    "fig01", "fig02", "fig03", "fig04", "fig05", "fig06", "fig07", "fig08", "fig09", "fig10",
    "fig11", "figB1",
];

const GENDERS: [GenderLabel; 2] = [GenderLabel::Male, GenderLabel::Female];

/// Written next to the tables so readers know how aggregates were formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsMeta {
    pub interval: String,
    pub weighted_gap: String,
    pub weighted_gap_weights: String,
    pub population: String,
    pub careers: usize,
    pub general_population: usize,
    pub eligible_countries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Breakdown {
    Overall,
    Discipline(Vec<String>),
    Country(Vec<String>),
}

/// Shares of each gender among careers starting in each of `cohorts`.
/// Unknown-gender careers are excluded from numerator and denominator unless
/// `include_unknown` is set.
pub fn career_start_shares(
    population: &[&AuthorCareer],
    by: &Breakdown,
    cohorts: &[i32],
    include_unknown: bool,
    with_interval: bool,
) -> Vec<CohortRow> {
    let statistic = if include_unknown {
        "start_share_incl_unknown"
    } else {
        "start_share"
    };
    let genders: &[GenderLabel] = if include_unknown {
        &[GenderLabel::Male, GenderLabel::Female, GenderLabel::Unknown]
    } else {
        &GENDERS
    };
    let mut rows = Vec::new();
    for &year in cohorts {
        let cohort = Cohort::gather(population.iter().copied(), year);
        let groups: Vec<Group> = match by {
            Breakdown::Overall => vec![(None, Box::new(|_: &AuthorCareer| true))],
            Breakdown::Discipline(ds) => ds
                .iter()
                .map(|d| {
                    let d2 = d.clone();
                    (
                        Some(d.as_str()),
                        Box::new(move |c: &AuthorCareer| c.disciplines.contains(&d2))
                            as Box<dyn Fn(&AuthorCareer) -> bool>,
                    )
                })
                .collect(),
            Breakdown::Country(cs) => cs
                .iter()
                .map(|k| {
                    let k2 = k.clone();
                    (
                        Some(k.as_str()),
                        Box::new(move |c: &AuthorCareer| c.countries.contains(&k2))
                            as Box<dyn Fn(&AuthorCareer) -> bool>,
                    )
                })
                .collect(),
        };
        for (label, keep) in &groups {
            let counts: Vec<u64> = genders
                .iter()
                .map(|g| cohort.members(*g).iter().filter(|c| keep(c)).count() as u64)
                .collect();
            let total: u64 = counts.iter().sum();
            if total == 0 {
                continue;
            }
            for (g, &k) in genders.iter().zip(&counts) {
                let mut row = CohortRow::new(statistic, k as f64 / total as f64, total)
                    .cohort(year)
                    .gender(*g);
                if with_interval {
                    row = row.interval(proportion_interval(k, total));
                }
                match by {
                    Breakdown::Overall => {}
                    Breakdown::Discipline(_) => row = row.discipline(label.unwrap()),
                    Breakdown::Country(_) => row = row.country(label.unwrap()),
                }
                rows.push(row);
            }
        }
    }
    rows
}

struct Context<'a> {
    config: &'a AnalysisConfig,
    /// Careers covered by an eligible country, any gender.
    general: Vec<&'a AuthorCareer>,
    /// Same, male and female only.
    resolved: Vec<&'a AuthorCareer>,
    disciplines: Vec<String>,
    eligible_countries: Vec<String>,
}

impl<'a> Context<'a> {
    fn cohort(&self, year: i32) -> Cohort<'a> {
        Cohort::gather(self.resolved.iter().copied(), year)
    }

    fn in_discipline<'b>(members: &'b [&'a AuthorCareer], d: &str) -> Vec<&'a AuthorCareer> {
        members
            .iter()
            .copied()
            .filter(|c| c.disciplines.iter().any(|x| x == d))
            .collect()
    }

    /// Last career year observable for a cohort inside the data window.
    fn max_career_year(&self, start: i32) -> u32 {
        (self.config.year_end - start + 1).max(0) as u32
    }
}

/// Computes all twelve tables. Output depends only on the inputs, not on
/// thread count or career order.
pub fn compute_figures(
    careers: &[AuthorCareer],
    eligibility: &EligibilitySet,
    config: &AnalysisConfig,
) -> (Vec<CohortTable>, StatsMeta) {
    let mut sorted: Vec<&AuthorCareer> = careers.iter().collect();
    sorted.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    let general: Vec<&AuthorCareer> = sorted
        .into_iter()
        .filter(|c| eligibility.covers(c))
        .collect();
    let resolved: Vec<&AuthorCareer> = general
        .iter()
        .copied()
        .filter(|c| c.gender.is_resolved())
        .collect();
    let ctx = Context {
        config,
        disciplines: config
            .disciplines
            .iter()
            .filter(|d| config.is_reported_discipline(d))
            .cloned()
            .collect(),
        eligible_countries: eligibility
            .eligible_countries()
            .map(str::to_string)
            .collect(),
        general,
        resolved,
    };

    type Builder = fn(&Context) -> Vec<CohortRow>;
    let builders: [(&str, Builder); 12] = [
        ("fig01", fig01),
        ("fig02", fig02),
        ("fig03", fig03),
        ("fig04", fig04),
        ("fig05", fig05),
        ("fig06", fig06),
        ("fig07", |c| discipline_productivity(c, Counting::Full)),
        ("fig08", |c| {
            discipline_productivity(c, Counting::Fractional)
        }),
        ("fig09", fig09),
        ("fig10", |c| discipline_position(c, Position::First)),
        ("fig11", |c| discipline_position(c, Position::Last)),
        ("figB1", fig_b1),
    ];
    let tables = builders
        .par_iter()
        .map(|(id, build)| CohortTable {
            id: id.to_string(),
            rows: build(&ctx),
        })
        .collect();
    let meta = StatsMeta {
        interval: "wilson_95".into(),
        weighted_gap: "mean over disciplines of male/female - 1".into(),
        weighted_gap_weights: "pooled".into(),
        population: "careers linked to at least one eligible country".into(),
        careers: careers.len(),
        general_population: ctx.general.len(),
        eligible_countries: ctx.eligible_countries.len(),
    };
    (tables, meta)
}

fn fig01(ctx: &Context) -> Vec<CohortRow> {
    let years: Vec<i32> = (ctx.config.year_start..=ctx.config.year_end).collect();
    let mut rows = career_start_shares(&ctx.general, &Breakdown::Overall, &years, true, false);
    rows.extend(career_start_shares(
        &ctx.general,
        &Breakdown::Overall,
        &years,
        false,
        false,
    ));
    rows
}

fn fig02(ctx: &Context) -> Vec<CohortRow> {
    career_start_shares(
        &ctx.resolved,
        &Breakdown::Discipline(ctx.disciplines.clone()),
        &ctx.config.discipline_cohorts,
        false,
        true,
    )
}

fn fig03(ctx: &Context) -> Vec<CohortRow> {
    career_start_shares(
        &ctx.resolved,
        &Breakdown::Country(ctx.eligible_countries.clone()),
        &[ctx.config.country_cohort],
        false,
        false,
    )
}

fn fig04(ctx: &Context) -> Vec<CohortRow> {
    let mut rows = Vec::new();
    for &start in &ctx.config.cohort_years {
        let cohort = ctx.cohort(start);
        // hazard(Y) needs activity after Y + 1 years to be observable
        let last = ctx.max_career_year(start).saturating_sub(2);
        for g in GENDERS {
            for y in 1..=last {
                if let Some((h, active)) = attrition_hazard(cohort.members(g), start, y) {
                    rows.push(
                        CohortRow::new("hazard", h, active)
                            .cohort(start)
                            .gender(g)
                            .career_year(y),
                    );
                }
            }
        }
    }
    rows
}

fn fig05(ctx: &Context) -> Vec<CohortRow> {
    let horizon = ctx.config.ended_horizon;
    let statistic = format!("ended_within_{horizon}");
    let mut rows = Vec::new();
    for &start in &ctx.config.discipline_cohorts {
        let cohort = ctx.cohort(start);
        for d in &ctx.disciplines {
            for g in GENDERS {
                let members = Context::in_discipline(cohort.members(g), d);
                if let Some((ended, n)) = ended_within(&members, horizon) {
                    rows.push(
                        CohortRow::new(&statistic, ended as f64 / n as f64, n)
                            .cohort(start)
                            .gender(g)
                            .discipline(d)
                            .interval(proportion_interval(ended, n)),
                    );
                }
            }
        }
    }
    rows
}

fn fig06(ctx: &Context) -> Vec<CohortRow> {
    let mut rows = Vec::new();
    for counting in [Counting::Full, Counting::Fractional] {
        let statistic = format!("productivity_{}", counting.as_str());
        for &start in &ctx.config.cohort_years {
            let cohort = ctx.cohort(start);
            for g in GENDERS {
                for y in 1..=ctx.max_career_year(start) {
                    if let Some((mean, n)) = mean_productivity(cohort.members(g), y, counting) {
                        rows.push(
                            CohortRow::new(&statistic, mean, n)
                                .cohort(start)
                                .gender(g)
                                .career_year(y),
                        );
                    }
                }
            }
        }
    }
    rows
}

fn discipline_productivity(ctx: &Context, counting: Counting) -> Vec<CohortRow> {
    let y = ctx.config.snapshot_year;
    let statistic = format!("productivity_{}", counting.as_str());
    let mut rows = Vec::new();
    for &start in &ctx.config.discipline_cohorts {
        let cohort = ctx.cohort(start);
        let mut gap_inputs = Vec::new();
        for d in &ctx.disciplines {
            let male = mean_productivity(&Context::in_discipline(&cohort.male, d), y, counting);
            let female = mean_productivity(&Context::in_discipline(&cohort.female, d), y, counting);
            for (g, r) in GENDERS.iter().zip([male, female]) {
                if let Some((mean, n)) = r {
                    rows.push(
                        CohortRow::new(&statistic, mean, n)
                            .cohort(start)
                            .gender(*g)
                            .discipline(d)
                            .career_year(y),
                    );
                }
            }
            if let (Some((m, nm)), Some((f, nf))) = (male, female) {
                gap_inputs.push((m, f, nm + nf));
            }
        }
        if let Some((gap, weight)) = weighted_relative_gap(&gap_inputs) {
            rows.push(
                CohortRow::new(format!("{statistic}_weighted_gap"), gap, weight)
                    .cohort(start)
                    .career_year(y),
            );
        }
    }
    rows
}

fn position_statistic(p: Position) -> &'static str {
    match p {
        Position::First => "first_author_prob",
        Position::Last => "last_author_prob",
        Position::Single => "single_author_prob",
        Position::Middle => "middle_author_prob",
    }
}

fn fig09(ctx: &Context) -> Vec<CohortRow> {
    let mut rows = Vec::new();
    for position in [Position::First, Position::Last] {
        for &start in &ctx.config.cohort_years {
            let cohort = ctx.cohort(start);
            for g in GENDERS {
                for y in 1..=ctx.max_career_year(start) {
                    if let Some((hits, total)) = position_counts(cohort.members(g), y, position) {
                        rows.push(
                            CohortRow::new(
                                position_statistic(position),
                                hits as f64 / total as f64,
                                total,
                            )
                            .cohort(start)
                            .gender(g)
                            .career_year(y),
                        );
                    }
                }
            }
        }
    }
    rows
}

fn discipline_position(ctx: &Context, position: Position) -> Vec<CohortRow> {
    let y = ctx.config.snapshot_year;
    let mut rows = Vec::new();
    for &start in &ctx.config.discipline_cohorts {
        let cohort = ctx.cohort(start);
        for d in &ctx.disciplines {
            for g in GENDERS {
                let members = Context::in_discipline(cohort.members(g), d);
                if let Some((hits, total)) = position_counts(&members, y, position) {
                    rows.push(
                        CohortRow::new(
                            position_statistic(position),
                            hits as f64 / total as f64,
                            total,
                        )
                        .cohort(start)
                        .gender(g)
                        .discipline(d)
                        .career_year(y)
                        .interval(proportion_interval(hits, total)),
                    );
                }
            }
        }
    }
    rows
}

fn fig_b1(ctx: &Context) -> Vec<CohortRow> {
    let mut rows = Vec::new();
    for &start in &ctx.config.cohort_years {
        let cohort = ctx.cohort(start);
        for &window in &ctx.config.gap_windows {
            if window > ctx.max_career_year(start) {
                continue;
            }
            for g in GENDERS {
                if let Some((averages, n)) = career_gaps(cohort.members(g), window) {
                    // a gap cannot include year 1, so lengths run to window - 1
                    for (i, avg) in averages.iter().enumerate().take(window as usize - 1) {
                        rows.push(
                            CohortRow::new(format!("gap_len_{}", i + 1), *avg, n)
                                .cohort(start)
                                .gender(g)
                                .career_year(window),
                        );
                    }
                }
            }
        }
    }
    rows
}
