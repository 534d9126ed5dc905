//! Analytic side of the model: critical connection probabilities, the exact
//! finite-n drift of the surprise statistic, and Hoeffding/union bounds.
//!
//! For a voter `i`, let `Y = (observed own-class) − (observed other-class)`
//! from the minority's point of view, or the reverse for the majority, and
//! shift it by the prior tilt so that `X ≥ 0` exactly when the voter predicts
//! the loser. `E[X]` is available in closed form; its sign decides the
//! asymptotic outcome and Hoeffding at deviation `(n − 1)^{3/4}` gives the
//! `exp(−2√(n−1))` bounds.

use std::fmt;
use std::str::FromStr;

use crate::electorate::Electorate;
use crate::media::{MediaSpec, Regime};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Majority,
    Minority,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeParams {
    pub n: usize,
    pub epsilon: f64,
    pub p: f64,
    pub q: f64,
    pub media: MediaSpec,
}

impl RegimeParams {
    pub fn new(n: usize, epsilon: f64, p: f64, q: f64, media: MediaSpec) -> Self {
        RegimeParams {
            n,
            epsilon,
            p,
            q,
            media,
        }
    }

    pub fn for_electorate(e: &Electorate, p: f64, q: f64, media: MediaSpec) -> Self {
        Self::new(e.n(), e.margin().value(), p, q, media)
    }

    /// `t / n`: `c` when influential, `a·n^{γ−1}` when uninfluential, 0 without media.
    pub fn effective_weight(&self) -> f64 {
        match self.media.regime {
            Regime::Influential { c } => c,
            Regime::Uninfluential { a, gamma } => a * (self.n as f64).powf(gamma - 1.0),
            Regime::Absent => 0.0,
        }
    }

    /// `4c(ε − δ)`, the media's contribution to both thresholds.
    fn media_term(&self) -> f64 {
        4.0 * self.effective_weight() * (self.epsilon - self.media.delta)
    }

    /// Hoeffding deviation scale `(n − 1)^{3/4}`.
    pub fn deviation_scale(&self) -> f64 {
        (self.n as f64 - 1.0).powf(0.75)
    }
}

/// Majority voters are unsurprised w.h.p. above this `p`, surprised below it.
pub fn majority_threshold(rp: &RegimeParams) -> f64 {
    let eps = rp.epsilon;
    (rp.q * (1.0 - 2.0 * eps) - rp.media_term()) / (1.0 + 2.0 * eps)
}

/// Minority voters are unsurprised w.h.p. below this `p`, surprised above it.
pub fn minority_threshold(rp: &RegimeParams) -> f64 {
    let eps = rp.epsilon;
    (rp.q * (1.0 + 2.0 * eps) + rp.media_term()) / (1.0 - 2.0 * eps)
}

/// Open interval of `p` in which every voter is unsurprised w.h.p.
pub fn corollary_range(rp: &RegimeParams) -> Option<(f64, f64)> {
    let (lo, hi) = (majority_threshold(rp), minority_threshold(rp));
    (lo < hi).then_some((lo, hi))
}

/// Exact `E[X_i]` at finite `n`, including the self-exclusion correction.
/// `X_i ≥ 0` is equivalent to voter `i` predicting the loser.
pub fn exact_expectation(rp: &RegimeParams, side: Side) -> f64 {
    let n = rp.n as f64;
    let (p, q, eps) = (rp.p, rp.q, rp.epsilon);
    let shared = 2.0 * p * eps + 2.0 * q * eps + rp.media_term();
    match side {
        Side::Majority => n / 2.0 * (q - (p + shared)) - (1.0 - p),
        Side::Minority => n / 2.0 * (p - (q + shared)) + (1.0 - p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityBounds {
    /// `exp(−2√(n−1))`
    pub per_voter: f64,
    /// `1 − (1/2 + ε)·n·b`, all majority voters unsurprised
    pub majority_unsurprised: f64,
    /// `1 − (1/2 − ε)·n·b`, all minority voters unsurprised
    pub minority_unsurprised: f64,
    /// `1 − (1 + 2ε)·n·b`, a whole class surprised (constant as printed for both classes)
    pub class_surprised: f64,
    /// `1 − (1 − 2ε)·n·b`, minority surprised with its own class size as coefficient
    pub minority_surprised_class_size: f64,
    /// `1 − n·b`, every voter unsurprised
    pub all_unsurprised: f64,
}

pub fn probability_bounds(rp: &RegimeParams) -> ProbabilityBounds {
    assert!(rp.n >= 2, "bounds need at least two voters");
    let n = rp.n as f64;
    let eps = rp.epsilon;
    let b = (-2.0 * (n - 1.0).sqrt()).exp();
    ProbabilityBounds {
        per_voter: b,
        majority_unsurprised: 1.0 - (0.5 + eps) * n * b,
        minority_unsurprised: 1.0 - (0.5 - eps) * n * b,
        class_surprised: 1.0 - (1.0 + 2.0 * eps) * n * b,
        minority_surprised_class_size: 1.0 - (1.0 - 2.0 * eps) * n * b,
        all_unsurprised: 1.0 - n * b,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outlook {
    UnsurprisedWhp,
    SurprisedWhp,
    NearCritical,
}

impl Outlook {
    pub fn label(self) -> &'static str {
        match self {
            Outlook::UnsurprisedWhp => "unsurprised-whp",
            Outlook::SurprisedWhp => "surprised-whp",
            Outlook::NearCritical => "near-critical",
        }
    }
}

impl fmt::Display for Outlook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Outlook {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unsurprised-whp" => Ok(Outlook::UnsurprisedWhp),
            "surprised-whp" => Ok(Outlook::SurprisedWhp),
            "near-critical" => Ok(Outlook::NearCritical),
            other => Err(format!("unknown theory label {other:?}")),
        }
    }
}

fn outlook(expectation: f64, scale: f64) -> Outlook {
    if expectation <= -scale {
        Outlook::UnsurprisedWhp
    } else if expectation >= scale {
        Outlook::SurprisedWhp
    } else {
        Outlook::NearCritical
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryVerdict {
    pub majority_threshold: f64,
    pub minority_threshold: f64,
    pub majority_prediction: Outlook,
    pub minority_prediction: Outlook,
    pub all_unsurprised_range: Option<(f64, f64)>,
    pub per_voter_bound: f64,
    /// Union bound for the whole majority class, matching the sign of its drift.
    pub union_bound_majority: f64,
    /// Same for the minority, with the printed `(1 + 2ε)` constant when surprised.
    pub union_bound_minority: f64,
    /// Minority union bound using the class-size coefficient `(1 − 2ε)` when surprised.
    pub union_bound_minority_class_size: f64,
    pub all_unsurprised_bound: f64,
    pub exact_expectation_majority: f64,
    pub exact_expectation_minority: f64,
    pub deviation_scale: f64,
}

/// Labels each class. A label other than `near-critical` requires
/// `|E[X]| ≥ (n − 1)^{3/4}`, the deviation at which the Hoeffding bound is
/// invoked; inside that band the asymptotic statement does not apply at this `n`.
pub fn classify_regime(rp: &RegimeParams) -> TheoryVerdict {
    let scale = rp.deviation_scale();
    let e_maj = exact_expectation(rp, Side::Majority);
    let e_min = exact_expectation(rp, Side::Minority);
    let bounds = probability_bounds(rp);
    let (maj_union, min_union, min_union_tight) = (
        if e_maj < 0.0 { bounds.majority_unsurprised } else { bounds.class_surprised },
        if e_min < 0.0 { bounds.minority_unsurprised } else { bounds.class_surprised },
        if e_min < 0.0 {
            bounds.minority_unsurprised
        } else {
            bounds.minority_surprised_class_size
        },
    );
    TheoryVerdict {
        majority_threshold: majority_threshold(rp),
        minority_threshold: minority_threshold(rp),
        majority_prediction: outlook(e_maj, scale),
        minority_prediction: outlook(e_min, scale),
        all_unsurprised_range: corollary_range(rp),
        per_voter_bound: bounds.per_voter,
        union_bound_majority: maj_union,
        union_bound_minority: min_union,
        union_bound_minority_class_size: min_union_tight,
        all_unsurprised_bound: bounds.all_unsurprised,
        exact_expectation_majority: e_maj,
        exact_expectation_minority: e_min,
        deviation_scale: scale,
    }
}
