//! Traditional media as a Beta(α, β) prior.
//!
//! The prior mass `t = α + β` measures media influence and is either `c·n`
//! (influential), `a·n^γ` (uninfluential) or absent altogether (uniform
//! Beta(1, 1)). The prior mean is the true vote share of `a1` shifted by the
//! bias `δ` towards the loser: `α/(α+β) = 1/2 + (ε − δ)`.

use serde::{Deserialize, Serialize};

use crate::electorate::Electorate;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum Regime {
    /// `t = c·n`
    Influential { c: f64 },
    /// `t = a·n^γ`, `γ ∈ (0, 1)`
    Uninfluential { a: f64, gamma: f64 },
    Absent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediaSpec {
    pub regime: Regime,
    pub delta: f64,
}

impl MediaSpec {
    pub fn influential(c: f64, delta: f64) -> Self {
        MediaSpec {
            regime: Regime::Influential { c },
            delta,
        }
    }

    pub fn uninfluential(a: f64, gamma: f64, delta: f64) -> Self {
        MediaSpec {
            regime: Regime::Uninfluential { a, gamma },
            delta,
        }
    }

    pub fn absent() -> Self {
        MediaSpec {
            regime: Regime::Absent,
            delta: 0.0,
        }
    }

    /// Prior mass `t` for an electorate of `n` voters; `None` when absent.
    pub fn influence(&self, n: usize) -> Option<f64> {
        let n = n as f64;
        match self.regime {
            Regime::Influential { c } => Some(c * n),
            Regime::Uninfluential { a, gamma } => Some(a * n.powf(gamma)),
            Regime::Absent => None,
        }
    }

    /// Checks weights and exponent, and that δ lies in `[−(1/2 − ε), 1/2 + ε]`.
    pub fn validate(&self, epsilon: f64) -> Result<()> {
        match self.regime {
            Regime::Influential { c } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::Media(format!("global weight c must be >= 0, got {c}")));
                }
            }
            Regime::Uninfluential { a, gamma } => {
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::Media(format!("global weight a must be >= 0, got {a}")));
                }
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::Media(format!("gamma must lie in (0, 1), got {gamma}")));
                }
            }
            Regime::Absent => return Ok(()),
        }
        let (lo, hi) = (-(0.5 - epsilon), 0.5 + epsilon);
        if !(self.delta >= lo && self.delta <= hi) {
            return Err(Error::Media(format!(
                "bias delta={} outside [{lo}, {hi}] for epsilon={epsilon}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Beta prior hyperparameters, kept as reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediaPrior {
    alpha: f64,
    beta: f64,
}

impl MediaPrior {
    /// Requires `α, β ≥ 1` so that the posterior mode is interior.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha >= 1.0 && beta >= 1.0) {
            return Err(Error::Media(format!(
                "prior needs alpha >= 1 and beta >= 1, got ({alpha}, {beta})"
            )));
        }
        Ok(MediaPrior { alpha, beta })
    }

    /// Skips the `α, β ≥ 1` check. Only `α + β > 1` is assumed, which keeps
    /// every MAP denominator positive; estimates may then leave `[0, 1]`.
    pub fn new_unchecked(alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha + beta > 1.0);
        MediaPrior { alpha, beta }
    }

    pub fn uniform() -> Self {
        MediaPrior {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.alpha + self.beta
    }

    /// α − β, the prior's pull towards `a1`.
    pub fn tilt(&self) -> f64 {
        self.alpha - self.beta
    }
}

/// Derives the Beta prior for `spec` on electorate `e`.
///
/// A zero global weight means no media at all and yields the uniform prior,
/// as does the absent regime.
pub fn build_prior(spec: &MediaSpec, e: &Electorate) -> Result<MediaPrior> {
    let eps = e.margin().value();
    spec.validate(eps)?;
    let t = match spec.influence(e.n()) {
        None => return Ok(MediaPrior::uniform()),
        Some(0.0) => return Ok(MediaPrior::uniform()),
        Some(t) => t,
    };
    let shift = eps - spec.delta;
    let alpha = t * (0.5 + shift);
    let beta = t * (0.5 - shift);
    if alpha < 1.0 || beta < 1.0 {
        let slack = 0.5 - shift.abs();
        let hint = if slack > 0.0 {
            format!("t >= {:.6} is needed at epsilon - delta = {shift}", 1.0 / slack)
        } else {
            format!("no t is valid at epsilon - delta = {shift}")
        };
        return Err(Error::Media(format!(
            "prior (alpha, beta) = ({alpha}, {beta}) at t = {t} has a parameter below 1; {hint}"
        )));
    }
    Ok(MediaPrior { alpha, beta })
}
