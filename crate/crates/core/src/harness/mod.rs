//! Monte Carlo trials and parameter sweeps.
//!
//! A sweep is a grid of points (series × axis values), each run for a number
//! of independent trials. Seeds follow master → point → trial → voter, and a
//! point's seed is derived from its parameter values rather than its
//! position, so reordering or extending the grid leaves existing points
//! untouched.

pub mod config;
pub mod output;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electorate::Electorate;
use crate::error::{Error, Result};
use crate::media::{build_prior, MediaSpec, Regime};
use crate::netgen::{Backend, BlockProbs, GeoKernel, NetworkSampler, Position, EARTH_RADIUS_KM};
use crate::perception::{surprise_fractions, SurpriseFractions};
use crate::seeds;
use crate::stats::mean_se;
use crate::theory::{classify_regime, Outlook, RegimeParams};

/// Env var capping the number of worker threads.
pub const THREADS_ENV: &str = "SURPRISE_SIM_THREADS";

/// The voters of an experiment, with positions when they came from regional data.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub electorate: Electorate,
    pub positions: Option<Vec<Position>>,
}

impl Population {
    pub fn synthetic(electorate: Electorate) -> Self {
        Population {
            electorate,
            positions: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoSettings {
    pub weight: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    EARTH_RADIUS_KM
}

impl Default for GeoSettings {
    fn default() -> Self {
        GeoSettings {
            weight: 0.1,
            radius: EARTH_RADIUS_KM,
        }
    }
}

/// Network-model settings shared by every point of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NetSettings {
    pub backend: Backend,
    pub allow_inverted: bool,
    pub geo: Option<GeoSettings>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    #[default]
    Influential,
    Uninfluential,
    Absent,
}

/// Every tunable number of a single simulation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointParams {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub c: f64,
    pub a: f64,
    pub gamma: f64,
    pub regime: RegimeKind,
}

impl PointParams {
    pub fn media(&self) -> MediaSpec {
        let regime = match self.regime {
            RegimeKind::Influential => Regime::Influential { c: self.c },
            RegimeKind::Uninfluential => Regime::Uninfluential {
                a: self.a,
                gamma: self.gamma,
            },
            RegimeKind::Absent => Regime::Absent,
        };
        MediaSpec {
            regime,
            delta: self.delta,
        }
    }

    fn block_probs(&self, allow_inverted: bool) -> Result<BlockProbs> {
        if allow_inverted {
            BlockProbs::allow_inverted(self.p, self.q)
        } else {
            BlockProbs::new(self.p, self.q)
        }
    }

    fn seed_labels(&self) -> [u64; 7] {
        [
            self.p.to_bits(),
            self.q.to_bits(),
            self.delta.to_bits(),
            self.c.to_bits(),
            self.a.to_bits(),
            self.gamma.to_bits(),
            self.regime as u64,
        ]
    }

    /// Seed of this point under `master`.
    pub fn seed(&self, master: u64) -> u64 {
        seeds::derive_path(master, &self.seed_labels())
    }
}

impl fmt::Display for PointParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} q={} delta={}", self.p, self.q, self.delta)?;
        match self.regime {
            RegimeKind::Influential => write!(f, " c={}", self.c),
            RegimeKind::Uninfluential => write!(f, " a={} gamma={}", self.a, self.gamma),
            RegimeKind::Absent => write!(f, " media=absent"),
        }
    }
}

pub fn trial_seed(point_seed: u64, trial: usize) -> u64 {
    seeds::derive(point_seed, trial as u64)
}

/// Everything needed to run trials of one point; built once per point.
pub struct PreparedPoint<'a> {
    population: &'a Population,
    sampler: NetworkSampler,
    prior: crate::media::MediaPrior,
}

impl<'a> PreparedPoint<'a> {
    pub fn new(population: &'a Population, params: &PointParams, net: &NetSettings) -> Result<Self> {
        let e = &population.electorate;
        let bp = params.block_probs(net.allow_inverted)?;
        let kernel = match (net.geo, &population.positions) {
            (None, _) => None,
            (Some(g), Some(positions)) => Some(GeoKernel::with_radius(g.weight, g.radius, positions.clone())?),
            (Some(_), None) => {
                return Err(Error::Network(
                    "the geographic kernel needs voter positions (use regional data)".into(),
                ))
            }
        };
        let sampler = NetworkSampler::new(e, bp, kernel.as_ref(), net.backend)?;
        let prior = build_prior(&params.media(), e)?;
        Ok(PreparedPoint {
            population,
            sampler,
            prior,
        })
    }

    pub fn run(&self, trial_seed: u64) -> SurpriseFractions {
        let counts = self.sampler.sample(trial_seed);
        surprise_fractions(&self.population.electorate, &counts, &self.prior)
    }
}

/// One end-to-end sample: neighbourhoods, prior, surprised fractions.
pub fn run_trial(
    population: &Population,
    params: &PointParams,
    net: &NetSettings,
    trial_seed: u64,
) -> Result<SurpriseFractions> {
    Ok(PreparedPoint::new(population, params, net)?.run(trial_seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisVar {
    C,
    A,
    Delta,
    P,
    Q,
    Gamma,
}

impl AxisVar {
    pub fn name(self) -> &'static str {
        match self {
            AxisVar::C => "c",
            AxisVar::A => "a",
            AxisVar::Delta => "delta",
            AxisVar::P => "p",
            AxisVar::Q => "q",
            AxisVar::Gamma => "gamma",
        }
    }

    fn apply(self, params: &mut PointParams, value: f64) {
        match self {
            AxisVar::C => {
                params.c = value;
                params.regime = RegimeKind::Influential;
            }
            AxisVar::A => {
                params.a = value;
                params.regime = RegimeKind::Uninfluential;
            }
            AxisVar::Delta => params.delta = value,
            AxisVar::P => params.p = value,
            AxisVar::Q => params.q = value,
            AxisVar::Gamma => {
                params.gamma = value;
                params.regime = RegimeKind::Uninfluential;
            }
        }
    }
}

/// Per-series parameter overrides on top of the base point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub label: Option<String>,
    pub delta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub a: Option<f64>,
}

impl Series {
    fn apply(&self, base: &PointParams) -> PointParams {
        let mut out = *base;
        out.delta = self.delta.unwrap_or(out.delta);
        out.p = self.p.unwrap_or(out.p);
        out.q = self.q.unwrap_or(out.q);
        out.c = self.c.unwrap_or(out.c);
        out.a = self.a.unwrap_or(out.a);
        if let Some(g) = self.gamma {
            out.gamma = g;
            out.regime = RegimeKind::Uninfluential;
        }
        out
    }

    pub fn display_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let parts: Vec<String> = [
            ("delta", self.delta),
            ("p", self.p),
            ("q", self.q),
            ("gamma", self.gamma),
            ("c", self.c),
            ("a", self.a),
        ]
        .iter()
        .filter_map(|(k, v)| v.map(|v| format!("{k}={v}")))
        .collect();
        if parts.is_empty() {
            "base".into()
        } else {
            parts.join(" ")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub population: Population,
    pub base: PointParams,
    pub net: NetSettings,
    pub axis: AxisVar,
    pub values: Vec<f64>,
    pub series: Vec<Series>,
    pub trials: usize,
    pub master_seed: u64,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Sweep("axis grid is empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Sweep("axis values must be finite".into()));
        }
        if self.trials == 0 {
            return Err(Error::Sweep("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn series_or_base(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series::default()]
        } else {
            self.series.clone()
        }
    }

    /// Grid points in output order: series, then ascending axis value.
    pub fn points(&self) -> Vec<(String, f64, PointParams)> {
        let mut values = self.values.clone();
        values.sort_by(f64::total_cmp);
        values.dedup();
        self.series_or_base()
            .iter()
            .flat_map(|s| {
                let label = s.display_label();
                let params = s.apply(&self.base);
                values.iter().map(move |&v| {
                    let mut p = params;
                    self.axis.apply(&mut p, v);
                    (label.clone(), v, p)
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub series: String,
    pub axis_value: f64,
    pub maj_frac: f64,
    pub maj_se: f64,
    pub min_frac: f64,
    pub min_se: f64,
    pub trials: usize,
    pub theory_majority: Outlook,
    pub theory_minority: Outlook,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub axis_name: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn series(&self, label: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.series == label).collect()
    }
}

/// Thread count: explicit request, else `SURPRISE_SIM_THREADS`, else all cores.
pub fn worker_count(requested: Option<usize>) -> Result<usize> {
    if let Some(n) = requested {
        return if n == 0 {
            Err(Error::Config("worker count must be at least 1".into()))
        } else {
            Ok(n)
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn worker_pool(requested: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(requested)?)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn run_point(spec: &SweepSpec, series: &str, axis_value: f64, params: &PointParams) -> Result<SweepRow> {
    let point = PreparedPoint::new(&spec.population, params, &spec.net)?;
    let point_seed = params.seed(spec.master_seed);
    let (maj, min): (Vec<f64>, Vec<f64>) = (0..spec.trials)
        .map(|t| {
            let f = point.run(trial_seed(point_seed, t));
            (f.majority, f.minority)
        })
        .unzip();
    let (maj_frac, maj_se) = mean_se(&maj);
    let (min_frac, min_se) = mean_se(&min);
    let verdict = classify_regime(&RegimeParams::for_electorate(
        &spec.population.electorate,
        params.p,
        params.q,
        params.media(),
    ));
    Ok(SweepRow {
        series: series.to_string(),
        axis_value,
        maj_frac,
        maj_se,
        min_frac,
        min_se,
        trials: spec.trials,
        theory_majority: verdict.majority_prediction,
        theory_minority: verdict.minority_prediction,
    })
}

/// Runs every grid point on a pool of `workers` threads (see [`worker_count`]).
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec.points();
    let pool = worker_pool(workers)?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|(series, value, params)| {
                run_point(spec, series, *value, params).map_err(|e| Error::SweepPoint {
                    point: format!("series {series:?}, {}={value} ({params})", spec.axis.name()),
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult {
        axis_name: spec.axis.name().to_string(),
        rows,
    })
}
