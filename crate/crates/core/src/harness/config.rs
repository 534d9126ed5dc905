//! TOML run configuration.
//!
//! ```toml
//! [electorate]
//! n1 = 5200
//! n2 = 4800
//!
//! [net]
//! p = 0.05
//! q = 0.04
//!
//! [media]
//! regime = "influential"
//! c = 0.01
//! delta = 0.0
//!
//! [sweep]
//! axis = "c"
//! values = [0.0, 0.01, 0.02]
//! trials = 20
//! seed = 1
//!
//! [[series]]
//! delta = -0.1
//! ```
//!
//! Regional data replaces `n1`/`n2` with `votes`, `coords`, `sample_size` and
//! optionally `a1_column`. Relative paths resolve against the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{AxisVar, GeoSettings, NetSettings, PointParams, Population, RegimeKind, Series, SweepSpec};
use crate::electorate::Electorate;
use crate::error::{Error, Result};
use crate::ingest::{apply_mapping, load_regions, sample_voters, A1Column};
use crate::netgen::{Backend, EARTH_RADIUS_KM};
use crate::seeds;

/// Seed label for drawing the sampled electorate from the master seed.
const SAMPLE_LABEL: u64 = 0x5341_4d50;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub electorate: ElectorateConfig,
    pub net: NetConfig,
    #[serde(default)]
    pub media: MediaConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub series: Vec<Series>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectorateConfig {
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub votes: Option<PathBuf>,
    pub coords: Option<PathBuf>,
    pub sample_size: Option<usize>,
    #[serde(default)]
    pub a1_column: A1Column,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub allow_inverted: bool,
    #[serde(default)]
    pub geo: GeoConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_weight() -> f64 {
    0.1
}

fn default_radius() -> f64 {
    EARTH_RADIUS_KM
}

impl Default for GeoConfig {
    fn default() -> Self {
        GeoConfig {
            enabled: false,
            weight: default_weight(),
            radius: default_radius(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediaConfig {
    #[serde(default)]
    pub regime: RegimeKind,
    #[serde(default)]
    pub c: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "half")]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl Default for MediaConfig {
    fn default() -> Self {
        MediaConfig {
            regime: RegimeKind::Absent,
            c: 0.0,
            a: 1.0,
            gamma: 0.5,
            delta: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_axis")]
    pub axis: AxisVar,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_axis() -> AxisVar {
    AxisVar::C
}

fn default_trials() -> usize {
    20
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axis: default_axis(),
            values: None,
            start: None,
            stop: None,
            step: None,
            trials: default_trials(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    /// Explicit `values`, or the inclusive range `start..=stop` by `step`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        match (&self.values, self.start, self.stop, self.step) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (None, Some(start), Some(stop), Some(step)) => {
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(Error::Config("range needs step > 0 and stop >= start".into()));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // rounded so that 0.1 + 0.01 * k prints as written
                Ok((0..=n)
                    .map(|k| {
                        let v = start + step * k as f64;
                        (v * 1e12).round() / 1e12
                    })
                    .collect())
            }
            (None, None, None, None) => Ok(Vec::new()),
            _ => Err(Error::Config(
                "give either sweep.values or all of sweep.start, sweep.stop, sweep.step".into(),
            )),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.electorate.votes, &mut cfg.electorate.coords].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn base_params(&self) -> PointParams {
        PointParams {
            p: self.net.p,
            q: self.net.q,
            delta: self.media.delta,
            c: self.media.c,
            a: self.media.a,
            gamma: self.media.gamma,
            regime: self.media.regime,
        }
    }

    pub fn net_settings(&self) -> NetSettings {
        NetSettings {
            backend: self.net.backend,
            allow_inverted: self.net.allow_inverted,
            geo: self.net.geo.enabled.then_some(GeoSettings {
                weight: self.net.geo.weight,
                radius: self.net.geo.radius,
            }),
        }
    }

    /// Builds the voters; regional data is sampled once from the master seed.
    pub fn population(&self) -> Result<Population> {
        let el = &self.electorate;
        match (el.n1, el.n2, &el.votes, &el.coords) {
            (Some(n1), Some(n2), None, None) => Ok(Population::synthetic(Electorate::new(n1, n2)?)),
            (None, None, Some(votes), Some(coords)) => {
                let k = el
                    .sample_size
                    .ok_or_else(|| Error::Config("electorate.sample_size is required with regional data".into()))?;
                let records = apply_mapping(load_regions(votes, coords)?, el.a1_column);
                let sample = sample_voters(&records, k, seeds::derive(self.sweep.seed, SAMPLE_LABEL))?;
                Ok(Population {
                    electorate: sample.electorate,
                    positions: Some(sample.positions),
                })
            }
            _ => Err(Error::Config(
                "electorate needs either n1 and n2, or votes and coords".into(),
            )),
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        Ok(SweepSpec {
            population: self.population()?,
            base: self.base_params(),
            net: self.net_settings(),
            axis: self.sweep.axis,
            values: self.sweep.grid()?,
            series: self.series.clone(),
            trials: self.sweep.trials,
            master_seed: self.sweep.seed,
        })
    }
}
