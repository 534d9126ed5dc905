//! Winner perception: each voter's MAP estimate of `a1`'s support under the
//! media prior, their predicted winner and whether the result surprises them.

use rayon::prelude::*;

use crate::electorate::{Candidate, Class, Electorate};
use crate::media::MediaPrior;
use crate::netgen::NeighborCounts;

/// MAP estimate `(α + N₁ + I(i∈H₁) − 1) / (α + β + N − 1)`, where `N₁`
/// counts observed `H1` voters and `N = n1_obs + n2_obs`. The voter counts
/// themselves as one extra observation.
pub fn map_estimate(prior: &MediaPrior, class: Class, n1_obs: u32, n2_obs: u32) -> f64 {
    let own = if class == Class::H1 { 1.0 } else { 0.0 };
    let seen = f64::from(n1_obs) + f64::from(n2_obs);
    (prior.alpha() + f64::from(n1_obs) + own - 1.0) / (prior.mass() + seen - 1.0)
}

/// `a1` iff the MAP estimate is strictly above one half.
pub fn predict(prior: &MediaPrior, class: Class, n1_obs: u32, n2_obs: u32) -> Candidate {
    if map_estimate(prior, class, n1_obs, n2_obs) > 0.5 {
        Candidate::A1
    } else {
        Candidate::A2
    }
}

/// Division-free form of [`predict`]: `a1` iff `α + 2·I(i∈H₁) − β > N₂ + 1 − N₁`.
pub fn predict_linear(prior: &MediaPrior, class: Class, n1_obs: u32, n2_obs: u32) -> Candidate {
    let own = if class == Class::H1 { 2.0 } else { 0.0 };
    let lhs = prior.alpha() + own - prior.beta();
    let rhs = f64::from(n2_obs) + 1.0 - f64::from(n1_obs);
    if lhs > rhs {
        Candidate::A1
    } else {
        Candidate::A2
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub q1_hat: f64,
    pub z: Candidate,
    pub surprised: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElectionOutcome {
    pub predictions: Vec<Prediction>,
    pub majority_fraction: f64,
    pub minority_fraction: f64,
}

/// Surprised fractions per class only, without per-voter detail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurpriseFractions {
    pub majority: f64,
    pub minority: f64,
}

/// An empty class has no surprised voters and reports 0.
fn fractions(e: &Electorate, surprised_by_class: [usize; 2]) -> SurpriseFractions {
    let frac = |class: Class| {
        let idx = if class == Class::H1 { 0 } else { 1 };
        match e.class_size(class) {
            0 => 0.0,
            size => surprised_by_class[idx] as f64 / size as f64,
        }
    };
    SurpriseFractions {
        majority: frac(e.majority()),
        minority: frac(e.minority()),
    }
}

/// Full per-voter evaluation against the electorate's true winner.
pub fn evaluate_election(e: &Electorate, counts: &NeighborCounts, prior: &MediaPrior) -> ElectionOutcome {
    assert_eq!(counts.len(), e.n(), "counts were generated for another electorate");
    let winner = e.winner();
    let predictions: Vec<Prediction> = (0..e.n())
        .into_par_iter()
        .with_min_len(4096)
        .map(|v| {
            let class = e.class_of(v);
            let (n1, n2) = counts.by_class(v, class);
            let z = predict_linear(prior, class, n1, n2);
            Prediction {
                q1_hat: map_estimate(prior, class, n1, n2),
                z,
                surprised: z != winner,
            }
        })
        .collect();
    let mut tally = [0usize; 2];
    for (v, pred) in predictions.iter().enumerate() {
        if pred.surprised {
            tally[usize::from(e.class_of(v) == Class::H2)] += 1;
        }
    }
    let f = fractions(e, tally);
    ElectionOutcome {
        predictions,
        majority_fraction: f.majority,
        minority_fraction: f.minority,
    }
}

/// Same fractions as [`evaluate_election`] without allocating predictions.
pub fn surprise_fractions(e: &Electorate, counts: &NeighborCounts, prior: &MediaPrior) -> SurpriseFractions {
    assert_eq!(counts.len(), e.n(), "counts were generated for another electorate");
    let winner = e.winner();
    let mut tally = [0usize; 2];
    for (idx, class) in [Class::H1, Class::H2].into_iter().enumerate() {
        tally[idx] = e
            .voters(class)
            .filter(|&v| {
                let (n1, n2) = counts.by_class(v, class);
                predict_linear(prior, class, n1, n2) != winner
            })
            .count();
    }
    fractions(e, tally)
}
