//! First-name rule cascade.
//!
//! Rules are tried top to bottom; the first that fires decides.
//!
//! | rule | condition | result |
//! |------|-----------|--------|
//! | R1 | primary: samples > 2, probability >= 0.90, male/female | primary's gender |
//! | R2 | primary: samples <= 10; guesser with country: male/female | guesser's gender |
//! | R3 | primary: samples <= 10; guesser with country: unknown or none; guesser without country: male/female | guesser's gender |
//! | R4 | primary: samples <= 10; fallback: samples > 3, probability >= 0.90, male/female | fallback's gender |
//! | R5 | primary: samples > 0 or fallback: samples > 0 | unknown |
//! | R6 | otherwise | no inference |

use serde::{Deserialize, Serialize};

use super::provider::{ProviderGender, ProviderResponse};
use super::GenderLabel;
use crate::config::AnalysisConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub min_probability: f64,
    pub primary_min_samples: u64,
    pub fallback_gate_samples: u64,
    pub fallback_min_samples: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::from(&AnalysisConfig::default())
    }
}

impl From<&AnalysisConfig> for Thresholds {
    fn from(c: &AnalysisConfig) -> Self {
        Thresholds {
            min_probability: c.min_probability,
            primary_min_samples: c.primary_min_samples,
            fallback_gate_samples: c.fallback_gate_samples,
            fallback_min_samples: c.fallback_min_samples,
        }
    }
}

/// Everything the providers said about one name in one country.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Responses {
    pub primary: ProviderResponse,
    pub guesser_with_country: ProviderResponse,
    pub guesser_without_country: ProviderResponse,
    pub fallback: ProviderResponse,
}

impl Responses {
    pub const NONE: Responses = Responses {
        primary: ProviderResponse::NONE,
        guesser_with_country: ProviderResponse::NONE,
        guesser_without_country: ProviderResponse::NONE,
        fallback: ProviderResponse::NONE,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl Rule {
    pub const ALL: [Rule; 6] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5, Rule::R6];

    /// The label this rule yields for `r`, or `None` if it does not fire.
    pub fn apply(self, r: &Responses, t: &Thresholds) -> Option<GenderLabel> {
        let gated = r.primary.samples <= t.fallback_gate_samples;
        match self {
            Rule::R1 => (r.primary.samples > t.primary_min_samples
                && r.primary.probability >= t.min_probability)
                .then(|| resolved(r.primary.gender))
                .flatten(),
            Rule::R2 => gated
                .then(|| resolved(r.guesser_with_country.gender))
                .flatten(),
            Rule::R3 => (gated
                && matches!(
                    r.guesser_with_country.gender,
                    ProviderGender::Unknown | ProviderGender::None
                ))
            .then(|| resolved(r.guesser_without_country.gender))
            .flatten(),
            Rule::R4 => (gated
                && r.fallback.samples > t.fallback_min_samples
                && r.fallback.probability >= t.min_probability)
                .then(|| resolved(r.fallback.gender))
                .flatten(),
            Rule::R5 => {
                (r.primary.samples > 0 || r.fallback.samples > 0).then_some(GenderLabel::Unknown)
            }
            Rule::R6 => Some(GenderLabel::NoInference),
        }
    }
}

fn resolved(g: ProviderGender) -> Option<GenderLabel> {
    match g {
        ProviderGender::Male => Some(GenderLabel::Male),
        ProviderGender::Female => Some(GenderLabel::Female),
        _ => None,
    }
}

/// Runs the cascade for a single name; total over all inputs.
pub fn run_cascade(r: &Responses, t: &Thresholds) -> (GenderLabel, Rule) {
    Rule::ALL
        .iter()
        .find_map(|rule| rule.apply(r, t).map(|g| (g, *rule)))
        .expect("R6 always fires")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ProviderGender::*;

    fn resp(gender: ProviderGender, samples: u64, probability: f64) -> ProviderResponse {
        ProviderResponse::new(gender, samples, probability)
    }

    fn run(r: Responses) -> (GenderLabel, Rule) {
        run_cascade(&r, &Thresholds::default())
    }

    #[test]
    fn rule1_high_confidence_primary() {
        let r = Responses {
            primary: resp(Female, 500, 0.97),
            ..Responses::NONE
        };
        assert_eq!(run(r), (GenderLabel::Female, Rule::R1));
    }

    #[test]
    fn rule2_guesser_with_country() {
        let r = Responses {
            guesser_with_country: ProviderResponse::category(Male),
            ..Responses::NONE
        };
        assert_eq!(run(r), (GenderLabel::Male, Rule::R2));
    }

    #[test]
    fn nothing_anywhere_is_no_inference() {
        assert_eq!(run(Responses::NONE), (GenderLabel::NoInference, Rule::R6));
    }

    #[test]
    fn weak_evidence_is_unknown() {
        let r = Responses {
            primary: resp(Male, 4, 0.60),
            guesser_with_country: ProviderResponse::category(Unknown),
            guesser_without_country: ProviderResponse::category(Unknown),
            fallback: resp(Male, 2, 0.99),
        };
        assert_eq!(run(r), (GenderLabel::Unknown, Rule::R5));
    }

    #[test]
    fn gate_blocks_other_providers_for_well_sampled_names() {
        let r = Responses {
            primary: resp(Male, 11, 0.6),
            guesser_with_country: ProviderResponse::category(Female),
            guesser_without_country: ProviderResponse::category(Female),
            fallback: resp(Female, 100, 0.99),
        };
        assert_eq!(run(r), (GenderLabel::Unknown, Rule::R5));
    }

    #[test]
    fn rule3_needs_unresolved_guesser_with_country() {
        let r = Responses {
            guesser_with_country: ProviderResponse::category(Unknown),
            guesser_without_country: ProviderResponse::category(Female),
            ..Responses::NONE
        };
        assert_eq!(run(r), (GenderLabel::Female, Rule::R3));
    }

    #[test]
    fn rule4_fallback() {
        let r = Responses {
            primary: resp(Male, 10, 0.5),
            fallback: resp(Female, 4, 0.9),
            ..Responses::NONE
        };
        assert_eq!(run(r), (GenderLabel::Female, Rule::R4));
        let r = Responses {
            fallback: resp(Female, 3, 0.99),
            ..Responses::NONE
        };
        assert_eq!(run(r), (GenderLabel::Unknown, Rule::R5));
    }

    fn gender() -> impl Strategy<Value = ProviderGender> {
        prop_oneof![Just(Male), Just(Female), Just(Unknown), Just(None)]
    }

    fn response() -> impl Strategy<Value = ProviderResponse> {
        (gender(), 0u64..1000, 0.0f64..=1.0).prop_map(|(g, s, p)| {
            if s == 0 && g.is_resolved() {
                ProviderResponse::new(Unknown, 0, p)
            } else {
                ProviderResponse::new(g, s, p)
            }
        })
    }

    fn responses() -> impl Strategy<Value = Responses> {
        (response(), gender(), gender(), response()).prop_map(|(a, bi, be, c)| Responses {
            primary: a,
            guesser_with_country: ProviderResponse::category(bi),
            guesser_without_country: ProviderResponse::category(be),
            fallback: c,
        })
    }

    proptest! {
        #[test]
        fn total_and_consistent(r in responses()) {
            let (label, rule) = run(r);
            prop_assert_eq!(rule.apply(&r, &Thresholds::default()), Some(label));
            prop_assert_eq!(label == GenderLabel::Unknown, rule == Rule::R5);
            prop_assert_eq!(label == GenderLabel::NoInference, rule == Rule::R6);
        }

        #[test]
        fn raising_primary_probability_only_moves_towards_its_gender(
            r in responses(), lo in 0.0f64..0.9, hi in 0.9f64..=1.0, g in prop_oneof![Just(Male), Just(Female)],
            samples in 3u64..1000,
        ) {
            let mut low = r;
            low.primary = resp(g, samples, lo);
            let mut high = r;
            high.primary = resp(g, samples, hi);
            let target = if g == Male { GenderLabel::Male } else { GenderLabel::Female };
            let before = run(low).0;
            let after = run(high).0;
            prop_assert_eq!(after, target);
            if before == target {
                prop_assert_eq!(after, before);
            }
        }
    }
}
