//! Per-cohort statistics over careers.
//!
//! A member is "still active after `Y` years" when `last_year >= start_year + Y`,
//! i.e. its career length exceeds `Y`. A member is active *in* career year `Y`
//! when its career length is at least `Y`.

use crate::careers::{AuthorCareer, Position};
use crate::gender::GenderLabel;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Careers that started in one calendar year, split by gender group.
#[derive(Debug, Clone, Default)]
pub struct Cohort<'a> {
    pub start_year: i32,
    pub male: Vec<&'a AuthorCareer>,
    pub female: Vec<&'a AuthorCareer>,
    pub unknown: Vec<&'a AuthorCareer>,
}

impl<'a> Cohort<'a> {
    pub fn gather<I>(careers: I, start_year: i32) -> Self
    where
        I: IntoIterator<Item = &'a AuthorCareer>,
    {
        let mut cohort = Cohort {
            start_year,
            ..Default::default()
        };
        for c in careers.into_iter().filter(|c| c.first_year == start_year) {
            match c.gender.group() {
                GenderLabel::Male => cohort.male.push(c),
                GenderLabel::Female => cohort.female.push(c),
                _ => cohort.unknown.push(c),
            }
        }
        cohort
    }

    pub fn members(&self, gender: GenderLabel) -> &[&'a AuthorCareer] {
        match gender.group() {
            GenderLabel::Male => &self.male,
            GenderLabel::Female => &self.female,
            _ => &self.unknown,
        }
    }

    pub fn len(&self) -> usize {
        self.male.len() + self.female.len() + self.unknown.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Members still active after `y` years.
pub fn active_after(members: &[&AuthorCareer], start_year: i32, y: u32) -> u64 {
    let threshold = start_year + y as i32;
    members.iter().filter(|c| c.last_year >= threshold).count() as u64
}

/// Share of the members still active after `y` years whose career ends in
/// the next year. Returns `(hazard, active after y)`.
pub fn attrition_hazard(members: &[&AuthorCareer], start_year: i32, y: u32) -> Option<(f64, u64)> {
    let active = active_after(members, start_year, y);
    if active == 0 {
        return None;
    }
    let next = active_after(members, start_year, y + 1);
    Some(((active - next) as f64 / active as f64, active))
}

/// `(ended, members)` where ended counts careers of at most `horizon` years.
pub fn ended_within(members: &[&AuthorCareer], horizon: u32) -> Option<(u64, u64)> {
    if members.is_empty() {
        return None;
    }
    let ended = members
        .iter()
        .filter(|c| c.career_length() <= horizon)
        .count() as u64;
    Some((ended, members.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Counting {
    Full,
    Fractional,
}

impl Counting {
    pub fn as_str(self) -> &'static str {
        match self {
            Counting::Full => "full",
            Counting::Fractional => "fractional",
        }
    }
}

/// Mean publications in career year `y` over members active in that year.
/// Returns `(mean, active members)`.
pub fn mean_productivity(
    members: &[&AuthorCareer],
    y: u32,
    counting: Counting,
) -> Option<(f64, u64)> {
    let mut sum = CompensatedSum::default();
    let mut n = 0u64;
    for c in members {
        if let Some(year) = c.year(y) {
            n += 1;
            sum.add(match counting {
                Counting::Full => year.full as f64,
                Counting::Fractional => year.fractional,
            });
        }
    }
    (n > 0).then(|| (sum.value() / n as f64, n))
}

/// `(publications in position, publications)` in career year `y`.
pub fn position_counts(
    members: &[&AuthorCareer],
    y: u32,
    position: Position,
) -> Option<(u64, u64)> {
    let (mut hits, mut total) = (0u64, 0u64);
    for year in members.iter().filter_map(|c| c.year(y)) {
        hits += year.position(position) as u64;
        total += year.full as u64;
    }
    (total > 0).then_some((hits, total))
}

/// Lengths of the maximal runs of zero-publication years in `activity`.
pub fn gap_runs(activity: &[u32]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = 0u32;
    for &count in activity {
        if count == 0 {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    runs
}

/// Average number of gaps of each length (index 0 is length 1) in the first
/// `window` career years, over members whose career spans at least `window`
/// years. Returns `(averages, members)`.
pub fn career_gaps(members: &[&AuthorCareer], window: u32) -> Option<(Vec<f64>, u64)> {
    let eligible: Vec<_> = members
        .iter()
        .filter(|c| c.career_length() >= window)
        .collect();
    if eligible.is_empty() || window == 0 {
        return None;
    }
    let mut tallies = vec![0u64; window as usize];
    for c in &eligible {
        let activity: Vec<u32> = c.per_year[..window as usize]
            .iter()
            .map(|y| y.full)
            .collect();
        for len in gap_runs(&activity) {
            tallies[len as usize - 1] += 1;
        }
    }
    let n = eligible.len() as u64;
    Some((tallies.iter().map(|&t| t as f64 / n as f64).collect(), n))
}

/// Discipline-weighted mean of the relative difference `male / female - 1`.
/// Each entry is `(male mean, female mean, weight)`; entries with a zero
/// female mean are skipped.
pub fn weighted_relative_gap(entries: &[(f64, f64, u64)]) -> Option<(f64, u64)> {
    let mut num = CompensatedSum::default();
    let mut total = 0u64;
    for &(m, f, w) in entries {
        if f > 0.0 && w > 0 {
            num.add(w as f64 * (m / f - 1.0));
            total += w;
        }
    }
    (total > 0).then(|| (num.value() / total as f64, total))
}
