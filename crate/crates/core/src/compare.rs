//! Cross-concept comparison: orderings of steady-state goodwill, the sign
//! laws behind them, and closed-loop/feedback equivalence.

use std::fmt;

use serde::Serialize;

use crate::assumptions::Classification;
use crate::concept::Concept;
use crate::cournot::comparative_statics;
use crate::model::ModelSpec;
use crate::report::fmt_g12;
use crate::stability::{jacobian, lemma1_check, Monotonicity, StabilityReport};
use crate::steady_state::{
    residual_closed_loop, residual_feedback, residual_open_loop, solve_steady_state, SteadyState,
};

const EQUIVALENCE_GRID: usize = 64;
const EQUIVALENCE_GAP: f64 = 1e-10;
const ROOT_AGREEMENT: f64 = 1e-8;
const LEMMA_SAMPLES: usize = 9;
/// Roots closer than this are treated as coincident.
const SAME_ROOT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The hypothesis is met and the claimed ordering is observed.
    Holds,
    /// The hypothesis is met but the observation contradicts the claim.
    Reversed,
    HypothesisNotMet,
    /// A required steady state is missing or the concept does not apply.
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Reversed => "reversed",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedState {
    pub state: SteadyState,
    /// `None` for the cartel, or when the Jacobian could not be formed.
    pub stability: Option<StabilityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptOutcome {
    pub concept: Concept,
    pub solved: Vec<SolvedState>,
    /// Why no steady state is reported.
    pub failure: Option<String>,
}

impl ConceptOutcome {
    /// First nondegenerate steady state, else the first one.
    pub fn primary(&self) -> Option<&SolvedState> {
        self.solved
            .iter()
            .find(|s| !s.state.degenerate)
            .or_else(|| self.solved.first())
    }

    fn goodwill(&self) -> Option<f64> {
        self.primary().map(|s| s.state.goodwill)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionCheck {
    pub verdict: Verdict,
    pub justification: String,
    /// Monotonicity of the open-loop residual between the two roots.
    pub lemma: Option<Monotonicity>,
}

impl PropositionCheck {
    fn not_applicable(reason: impl Into<String>) -> Self {
        PropositionCheck {
            verdict: Verdict::NotApplicable,
            justification: reason.into(),
            lemma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub digest: String,
    /// One entry per concept in report order.
    pub outcomes: Vec<ConceptOutcome>,
    /// Stage classification at the closed-loop steady state.
    pub classification: Option<Classification>,
    /// Open-loop residual at the closed-loop steady state.
    pub phi_open_at_closed: Option<f64>,
    /// Open-loop residual at the cartel steady state.
    pub phi_open_at_cartel: Option<f64>,
    /// Closed-loop versus open-loop ordering.
    pub closed_vs_open: PropositionCheck,
    /// Closed-loop and feedback equivalence.
    pub feedback_equivalence: PropositionCheck,
    pub equivalence_gap: Option<f64>,
    pub equivalence_root_gap: Option<f64>,
    /// Cartel versus open-loop ordering.
    pub cartel_vs_open: PropositionCheck,
    /// No sign law was violated and no verdict is `reversed`.
    pub self_consistent: bool,
}

impl ComparisonReport {
    pub fn outcome(&self, concept: Concept) -> &ConceptOutcome {
        self.outcomes
            .iter()
            .find(|o| o.concept == concept)
            .expect("every concept has an outcome")
    }

    pub fn goodwill(&self, concept: Concept) -> Option<f64> {
        self.outcome(concept).goodwill()
    }
}

fn solve_outcome(spec: &ModelSpec, concept: Concept) -> ConceptOutcome {
    match solve_steady_state(spec, concept) {
        Ok(states) => ConceptOutcome {
            concept,
            solved: states
                .states
                .into_iter()
                .map(|state| SolvedState {
                    stability: jacobian(spec, &state).ok(),
                    state,
                })
                .collect(),
            failure: None,
        },
        Err(e) => ConceptOutcome {
            concept,
            solved: Vec::new(),
            failure: Some(e.to_string()),
        },
    }
}

fn relation(x: f64, y: f64) -> &'static str {
    if (x - y).abs() <= SAME_ROOT {
        "="
    } else if x < y {
        "<"
    } else {
        ">"
    }
}

fn lemma_between(spec: &ModelSpec, x: f64, y: f64) -> Option<Monotonicity> {
    let (lo, hi) = (x.min(y), x.max(y));
    if hi - lo <= SAME_ROOT {
        return None;
    }
    lemma1_check(spec, (lo, hi), LEMMA_SAMPLES)
        .ok()
        .map(|r| r.verdict)
}

/// Shared verdict logic: with the sign law satisfied and the open-loop
/// residual decreasing between the roots, the claimed ordering must be
/// observed.
fn ordering_verdict(
    claim: &str,
    observed: String,
    expected_above: bool,
    other: f64,
    open: f64,
    lemma: Option<Monotonicity>,
    sign_law: bool,
) -> PropositionCheck {
    if !sign_law {
        return PropositionCheck {
            verdict: Verdict::HypothesisNotMet,
            justification: format!("{observed}; residual sign law not satisfied"),
            lemma,
        };
    }
    let Some(lemma) = lemma else {
        return PropositionCheck {
            verdict: Verdict::HypothesisNotMet,
            justification: format!("{observed}; roots coincide or residual slope unavailable"),
            lemma: None,
        };
    };
    let as_claimed = if expected_above {
        other > open
    } else {
        other < open
    };
    let (verdict, tail) = match (lemma, as_claimed) {
        (Monotonicity::Decreasing, true) => {
            (Verdict::Holds, format!("residual decreasing, {claim}"))
        }
        (Monotonicity::Decreasing, false) => (
            Verdict::Reversed,
            format!("residual decreasing but ordering contradicts: {claim}"),
        ),
        (m, true) => (
            Verdict::HypothesisNotMet,
            format!("residual {}, ordering as claimed", m.as_str()),
        ),
        (m, false) => (
            Verdict::HypothesisNotMet,
            format!("residual {}, ordering reversed", m.as_str()),
        ),
    };
    PropositionCheck {
        verdict,
        justification: format!("{observed}; {tail}"),
        lemma: Some(lemma),
    }
}

/// Solves every concept and evaluates the three comparison claims.
///
/// Never fails: a concept that cannot be solved records its error and the
/// claims depending on it become `not-applicable`.
pub fn check_propositions(spec: &ModelSpec) -> ComparisonReport {
    let outcomes: Vec<ConceptOutcome> = Concept::ALL
        .iter()
        .map(|&c| solve_outcome(spec, c))
        .collect();
    let find = |c: Concept| outcomes.iter().find(|o| o.concept == c).unwrap();
    let open = find(Concept::OpenLoop);
    let closed = find(Concept::ClosedLoop);
    let feedback = find(Concept::Feedback);
    let cartel = find(Concept::Cartel);
    let spillover_free = spec.is_spillover_free();
    let mut sign_law_broken = false;

    let classification = closed.primary().and_then(|s| {
        comparative_statics(spec, s.state.goodwill, s.state.output)
            .ok()
            .map(|cs| cs.classification)
    });
    let phi_open_at_closed = closed
        .goodwill()
        .and_then(|a| residual_open_loop(spec, a).ok());
    let phi_open_at_cartel = cartel
        .goodwill()
        .and_then(|a| residual_open_loop(spec, a).ok());

    let closed_vs_open = match (open.goodwill(), closed.goodwill()) {
        _ if !spillover_free => {
            PropositionCheck::not_applicable("advertising spills over to rivals")
        }
        (Some(a_open), Some(a_closed)) => {
            let observed = format!(
                "A** = {} {} A* = {}",
                fmt_g12(a_closed),
                relation(a_closed, a_open),
                fmt_g12(a_open)
            );
            let lemma = lemma_between(spec, a_open, a_closed);
            match (classification, phi_open_at_closed) {
                (Some(Classification::Substitutes), Some(phi)) => {
                    sign_law_broken |= phi >= 0.0;
                    ordering_verdict(
                        "substitutes give A** > A*",
                        observed,
                        true,
                        a_closed,
                        a_open,
                        lemma,
                        phi < 0.0,
                    )
                }
                (Some(Classification::Complements), Some(phi)) => {
                    sign_law_broken |= phi <= 0.0;
                    ordering_verdict(
                        "complements give A** < A*",
                        observed,
                        false,
                        a_closed,
                        a_open,
                        lemma,
                        phi > 0.0,
                    )
                }
                _ => PropositionCheck {
                    verdict: Verdict::HypothesisNotMet,
                    justification: format!(
                        "{observed}; outputs neither substitutes nor complements"
                    ),
                    lemma,
                },
            }
        }
        _ => PropositionCheck::not_applicable("open-loop or closed-loop steady state missing"),
    };

    let (feedback_equivalence, equivalence_gap, equivalence_root_gap) =
        check_equivalence(spec, spillover_free, closed, feedback);

    let cartel_vs_open = match (open.goodwill(), cartel.goodwill()) {
        (Some(a_open), Some(a_cartel)) => {
            let observed = format!(
                "A^c = {} {} A* = {}",
                fmt_g12(a_cartel),
                relation(a_cartel, a_open),
                fmt_g12(a_open)
            );
            let lemma = lemma_between(spec, a_open, a_cartel);
            if !spillover_free {
                PropositionCheck {
                    verdict: Verdict::HypothesisNotMet,
                    justification: format!("{observed}; advertising spills over to rivals"),
                    lemma,
                }
            } else {
                let law = phi_open_at_cartel.is_some_and(|phi| phi > 0.0);
                let aq = open
                    .primary()
                    .map(|s| s.state.assumptions.passed("demand.goodwill_output"))
                    .unwrap_or(false);
                sign_law_broken |= aq && !law;
                ordering_verdict("A^c < A*", observed, false, a_cartel, a_open, lemma, law)
            }
        }
        _ => PropositionCheck::not_applicable("open-loop or cartel steady state missing"),
    };

    let self_consistent = !sign_law_broken
        && [&closed_vs_open, &feedback_equivalence, &cartel_vs_open]
            .iter()
            .all(|p| p.verdict != Verdict::Reversed);

    ComparisonReport {
        digest: spec.digest(),
        outcomes,
        classification,
        phi_open_at_closed,
        phi_open_at_cartel,
        closed_vs_open,
        feedback_equivalence,
        equivalence_gap,
        equivalence_root_gap,
        cartel_vs_open,
        self_consistent,
    }
}

/// Largest pointwise gap between the closed-loop and feedback residuals on
/// a uniform grid over `[lo, hi]`; points where both are undefined are
/// skipped, points where only one is defined count as an infinite gap.
/// Returns `None` when no point is defined.
pub fn residual_gap(spec: &ModelSpec, lo: f64, hi: f64, points: usize) -> Option<f64> {
    let mut gap: Option<f64> = None;
    for j in 0..points {
        let a = lo + (hi - lo) * j as f64 / (points - 1).max(1) as f64;
        let g = match (residual_closed_loop(spec, a), residual_feedback(spec, a)) {
            (Ok(x), Ok(y)) => (x - y).abs(),
            (Err(_), Err(_)) => continue,
            _ => f64::INFINITY,
        };
        gap = Some(gap.map_or(g, |m| m.max(g)));
    }
    gap
}

fn check_equivalence(
    spec: &ModelSpec,
    spillover_free: bool,
    closed: &ConceptOutcome,
    feedback: &ConceptOutcome,
) -> (PropositionCheck, Option<f64>, Option<f64>) {
    if !spillover_free {
        return (
            PropositionCheck::not_applicable("advertising spills over to rivals"),
            None,
            None,
        );
    }
    let (Some(a_closed), Some(a_feedback)) = (closed.goodwill(), feedback.goodwill()) else {
        return (
            PropositionCheck::not_applicable("closed-loop or feedback steady state missing"),
            None,
            None,
        );
    };
    let hi = (2.0 * a_closed.max(a_feedback))
        .max(1.0)
        .min(spec.bounds.a_max);
    let gap = residual_gap(spec, 0.0, hi, EQUIVALENCE_GRID);
    let root_gap = (a_closed - a_feedback).abs();
    let check = match gap {
        None => PropositionCheck::not_applicable("residuals undefined on the comparison grid"),
        Some(g) if g <= EQUIVALENCE_GAP && root_gap <= ROOT_AGREEMENT => PropositionCheck {
            verdict: Verdict::Holds,
            justification: format!(
                "max residual gap {} on [0, {}], steady states differ by {}",
                fmt_g12(g),
                fmt_g12(hi),
                fmt_g12(root_gap)
            ),
            lemma: None,
        },
        Some(g) => PropositionCheck {
            verdict: Verdict::Reversed,
            justification: format!(
                "residual gap {} or steady-state gap {} exceeds tolerance",
                fmt_g12(g),
                fmt_g12(root_gap)
            ),
            lemma: None,
        },
    };
    (check, gap, Some(root_gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn saddle_regime_orderings_hold() {
        let r = check_propositions(&presets::affine_saddle());
        assert_eq!(r.closed_vs_open.verdict, Verdict::Holds);
        assert_eq!(r.feedback_equivalence.verdict, Verdict::Holds);
        assert_eq!(r.cartel_vs_open.verdict, Verdict::Holds);
        assert_eq!(r.classification, Some(Classification::Substitutes));
        assert!(r.equivalence_gap.unwrap() <= 1e-12);
        assert!(r.phi_open_at_closed.unwrap() < 0.0);
        assert!(r.phi_open_at_cartel.unwrap() > 0.0);
        assert!(r.self_consistent);
        assert!((r.goodwill(Concept::Cartel).unwrap() - 0.6875).abs() < 1e-8);
    }

    #[test]
    fn non_saddle_regime_is_conditional() {
        let r = check_propositions(&presets::lq_no_spillover());
        assert_eq!(r.closed_vs_open.verdict, Verdict::HypothesisNotMet);
        assert_eq!(r.cartel_vs_open.verdict, Verdict::HypothesisNotMet);
        assert_eq!(r.closed_vs_open.lemma, Some(Monotonicity::Increasing));
        assert!(r.closed_vs_open.justification.contains("reversed"));
        assert!(r.phi_open_at_closed.unwrap() < 0.0);
        assert!(r.self_consistent);
    }

    #[test]
    fn spillover_disables_closed_loop_claims() {
        let r = check_propositions(&presets::lq_spillover());
        assert_eq!(r.closed_vs_open.verdict, Verdict::NotApplicable);
        assert_eq!(r.feedback_equivalence.verdict, Verdict::NotApplicable);
        assert!(r.outcome(Concept::ClosedLoop).failure.is_some());
        assert!((r.goodwill(Concept::Cartel).unwrap() - 2.25 / 2.205).abs() < 1e-8);
    }
}
