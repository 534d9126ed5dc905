//! Neighbourhood sampling under the directed two-block model.
//!
//! Voter `i` observes voter `j` (edge `i → j`) independently with probability
//! `p` when they share a class and `q` otherwise, optionally scaled by a
//! geographic decay factor. Only per-voter class tallies are kept; edge lists
//! are never materialised.
//!
//! Two backends produce the same distribution:
//! - [`HomogeneousSampler`] draws each voter's two tallies as binomials.
//! - [`EdgewiseSampler`] draws every observer/target pair. Targets that share
//!   a class and an exact position are interchangeable, so their Bernoulli
//!   trials are pooled into one binomial draw.
//!
//! Each voter's draws come from its own substream of the seed, so results do
//! not depend on the number of worker threads.

mod binomial;
pub mod geo;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electorate::{Class, Electorate};
use crate::error::{Error, Result};
use crate::seeds::Substreams;
use binomial::BinomialDraw;
pub use geo::{haversine, pair_distance, GeoKernel, Position, EARTH_RADIUS_KM};

/// Intra-class (`p`) and inter-class (`q`) edge probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockProbs {
    p: f64,
    q: f64,
}

impl BlockProbs {
    /// Requires `p ≥ q`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let bp = Self::allow_inverted(p, q)?;
        if p < q {
            return Err(Error::Network(format!(
                "p={p} < q={q}: no filter bubble; set the override to probe this regime"
            )));
        }
        Ok(bp)
    }

    /// Like [`BlockProbs::new`] but permits `p < q`.
    pub fn allow_inverted(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Network(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(BlockProbs { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn between(&self, a: Class, b: Class) -> f64 {
        if a == b {
            self.p
        } else {
            self.q
        }
    }
}

/// Per-voter tallies of observed same-class and other-class voters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborCounts {
    same: Vec<u32>,
    other: Vec<u32>,
}

impl NeighborCounts {
    pub fn from_parts(same: Vec<u32>, other: Vec<u32>) -> Self {
        assert_eq!(same.len(), other.len());
        NeighborCounts { same, other }
    }

    pub fn len(&self) -> usize {
        self.same.len()
    }

    pub fn is_empty(&self) -> bool {
        self.same.is_empty()
    }

    pub fn same(&self, voter: usize) -> u32 {
        self.same[voter]
    }

    pub fn other(&self, voter: usize) -> u32 {
        self.other[voter]
    }

    /// `(N_{i,1}, N_{i,2})`: observed `H1` and `H2` voters.
    pub fn by_class(&self, voter: usize, class: Class) -> (u32, u32) {
        match class {
            Class::H1 => (self.same[voter], self.other[voter]),
            Class::H2 => (self.other[voter], self.same[voter]),
        }
    }

    pub fn same_counts(&self) -> &[u32] {
        &self.same
    }

    pub fn other_counts(&self) -> &[u32] {
        &self.other
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Homogeneous without a kernel, edgewise with one.
    #[default]
    Auto,
    Homogeneous,
    Edgewise,
}

fn count(n: usize) -> u32 {
    u32::try_from(n).expect("class sizes fit in u32")
}

/// Binomial tallies for the kernel-free model; O(n) time and memory.
#[derive(Clone, Debug)]
pub struct HomogeneousSampler {
    electorate: Electorate,
    // [same, other] for H1 then H2
    draws: [(BinomialDraw, BinomialDraw); 2],
}

impl HomogeneousSampler {
    pub fn new(e: &Electorate, bp: BlockProbs) -> Self {
        let (n1, n2) = (count(e.n1()), count(e.n2()));
        HomogeneousSampler {
            electorate: e.clone(),
            draws: [
                (BinomialDraw::new(n1.saturating_sub(1), bp.p), BinomialDraw::new(n2, bp.q)),
                (BinomialDraw::new(n2.saturating_sub(1), bp.p), BinomialDraw::new(n1, bp.q)),
            ],
        }
    }

    pub fn sample(&self, seed: u64) -> NeighborCounts {
        let streams = Substreams::new(seed);
        let e = &self.electorate;
        let pairs: Vec<(u32, u32)> = (0..e.n())
            .into_par_iter()
            .with_min_len(1024)
            .map(|v| {
                let (same, other) = match e.class_of(v) {
                    Class::H1 => &self.draws[0],
                    Class::H2 => &self.draws[1],
                };
                let mut rng = streams.stream(v as u64);
                (same.sample(&mut rng), other.sample(&mut rng))
            })
            .collect();
        let (same, other) = pairs.into_iter().unzip();
        NeighborCounts { same, other }
    }
}

/// A group of interchangeable targets: same class, same position.
#[derive(Clone, Debug)]
struct Site {
    class: Class,
    position: Option<usize>,
    members: Vec<u32>,
}

/// Largest number of distinct positions for which the kernel matrix is cached.
const KERNEL_CACHE_POSITIONS: usize = 2048;

/// Pairwise sampler; required whenever a geographic kernel is active.
#[derive(Clone, Debug)]
pub struct EdgewiseSampler {
    n: usize,
    bp: BlockProbs,
    sites: Vec<Site>,
    kernel: Option<KernelTable>,
}

#[derive(Clone, Debug)]
struct KernelTable {
    kernel: GeoKernel,
    positions: Vec<Position>,
    cached: Option<Vec<f64>>,
}

impl KernelTable {
    fn factor(&self, a: usize, b: usize) -> f64 {
        match &self.cached {
            Some(m) => m[a * self.positions.len() + b],
            None => self.kernel.factor(self.positions[a], self.positions[b]),
        }
    }
}

impl EdgewiseSampler {
    pub fn new(e: &Electorate, bp: BlockProbs, gk: Option<&GeoKernel>) -> Result<Self> {
        let n = e.n();
        let (sites, kernel) = match gk {
            None => {
                // every voter is its own target: one Bernoulli trial per ordered pair
                let sites = (0..n)
                    .map(|v| Site {
                        class: e.class_of(v),
                        position: None,
                        members: vec![count(v)],
                    })
                    .collect();
                (sites, None)
            }
            Some(gk) => {
                if gk.positions().len() != n {
                    return Err(Error::Network(format!(
                        "geo kernel has {} positions for {n} voters",
                        gk.positions().len()
                    )));
                }
                let mut positions = Vec::new();
                let mut position_ids = HashMap::new();
                let mut site_ids = HashMap::new();
                let mut sites: Vec<Site> = Vec::new();
                for (v, pos) in gk.positions().iter().enumerate() {
                    let pid = *position_ids.entry(pos.key()).or_insert_with(|| {
                        positions.push(*pos);
                        positions.len() - 1
                    });
                    let class = e.class_of(v);
                    let sid = *site_ids.entry((pid, class)).or_insert_with(|| {
                        sites.push(Site {
                            class,
                            position: Some(pid),
                            members: Vec::new(),
                        });
                        sites.len() - 1
                    });
                    sites[sid].members.push(count(v));
                }
                let cached = (positions.len() <= KERNEL_CACHE_POSITIONS).then(|| {
                    positions
                        .iter()
                        .flat_map(|a| positions.iter().map(|b| gk.factor(*a, *b)))
                        .collect()
                });
                let table = KernelTable {
                    kernel: gk.clone(),
                    positions,
                    cached,
                };
                (sites, Some(table))
            }
        };
        Ok(EdgewiseSampler {
            n,
            bp,
            sites,
            kernel,
        })
    }

    /// Edge probability from any member of `from` to any member of `to`.
    fn site_probability(&self, from: &Site, to: &Site) -> f64 {
        let p_class = self.bp.between(from.class, to.class);
        match (&self.kernel, from.position, to.position) {
            (Some(k), Some(a), Some(b)) => p_class * k.factor(a, b),
            _ => p_class,
        }
    }

    pub fn sample(&self, seed: u64) -> NeighborCounts {
        let streams = Substreams::new(seed);
        let tallies: Vec<Vec<(u32, u32, u32)>> = (0..self.sites.len())
            .into_par_iter()
            .map(|c| {
                let observer = &self.sites[c];
                let row: Vec<(bool, BinomialDraw)> = self
                    .sites
                    .iter()
                    .enumerate()
                    .filter_map(|(s, target)| {
                        let trials = target.members.len() - usize::from(s == c);
                        let prob = self.site_probability(observer, target);
                        (trials > 0 && prob > 0.0)
                            .then(|| (target.class == observer.class, BinomialDraw::new(count(trials), prob)))
                    })
                    .collect();
                observer
                    .members
                    .iter()
                    .map(|&v| {
                        let mut rng = streams.stream(u64::from(v));
                        let (mut same, mut other) = (0, 0);
                        for (is_same, draw) in &row {
                            let k = draw.sample(&mut rng);
                            if *is_same {
                                same += k;
                            } else {
                                other += k;
                            }
                        }
                        (v, same, other)
                    })
                    .collect()
            })
            .collect();
        let mut same = vec![0; self.n];
        let mut other = vec![0; self.n];
        for (v, s, o) in tallies.into_iter().flatten() {
            same[v as usize] = s;
            other[v as usize] = o;
        }
        NeighborCounts { same, other }
    }
}

/// Either backend behind one interface.
#[derive(Clone, Debug)]
pub enum NetworkSampler {
    Homogeneous(HomogeneousSampler),
    Edgewise(EdgewiseSampler),
}

impl NetworkSampler {
    pub fn new(e: &Electorate, bp: BlockProbs, gk: Option<&GeoKernel>, backend: Backend) -> Result<Self> {
        match (backend, gk) {
            (Backend::Homogeneous, Some(_)) => Err(Error::Network(
                "the homogeneous backend cannot apply a geographic kernel".into(),
            )),
            (Backend::Auto | Backend::Homogeneous, None) => {
                Ok(NetworkSampler::Homogeneous(HomogeneousSampler::new(e, bp)))
            }
            (Backend::Edgewise, _) | (Backend::Auto, Some(_)) => {
                Ok(NetworkSampler::Edgewise(EdgewiseSampler::new(e, bp, gk)?))
            }
        }
    }

    pub fn sample(&self, seed: u64) -> NeighborCounts {
        match self {
            NetworkSampler::Homogeneous(s) => s.sample(seed),
            NetworkSampler::Edgewise(s) => s.sample(seed),
        }
    }
}

pub fn sample_counts_homogeneous(e: &Electorate, bp: BlockProbs, seed: u64) -> NeighborCounts {
    HomogeneousSampler::new(e, bp).sample(seed)
}

pub fn sample_counts_edgewise(
    e: &Electorate,
    bp: BlockProbs,
    gk: Option<&GeoKernel>,
    seed: u64,
) -> Result<NeighborCounts> {
    Ok(EdgewiseSampler::new(e, bp, gk)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electorate::build_electorate;

    fn pool(threads: usize) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
    }

    #[test]
    fn block_probs_validation() {
        assert!(BlockProbs::new(0.3, 0.2).is_ok());
        assert!(BlockProbs::new(0.2, 0.3).is_err());
        assert!(BlockProbs::allow_inverted(0.2, 0.3).is_ok());
        assert!(BlockProbs::new(1.2, 0.3).is_err());
        assert!(BlockProbs::new(0.5, -0.1).is_err());
    }

    #[test]
    fn complete_blocks_never_self_observe() {
        let e = build_electorate(7, 4).unwrap();
        let bp = BlockProbs::new(1.0, 0.0).unwrap();
        for counts in [
            sample_counts_homogeneous(&e, bp, 3),
            sample_counts_edgewise(&e, bp, None, 3).unwrap(),
        ] {
            for v in e.voters(Class::H1) {
                assert_eq!((counts.same(v), counts.other(v)), (6, 0));
            }
            for v in e.voters(Class::H2) {
                assert_eq!((counts.same(v), counts.other(v)), (3, 0));
            }
        }
    }

    #[test]
    fn complete_graph_with_kernel_at_one_spot() {
        let e = build_electorate(5, 3).unwrap();
        let here = Position::new(52.0, -1.0).unwrap();
        let gk = GeoKernel::new(0.1, vec![here; 8]).unwrap();
        let counts = sample_counts_edgewise(&e, BlockProbs::new(1.0, 1.0).unwrap(), Some(&gk), 1).unwrap();
        for v in 0..8 {
            let own = e.class_size(e.class_of(v)) as u32 - 1;
            let other = e.class_size(e.class_of(v).other()) as u32;
            assert_eq!((counts.same(v), counts.other(v)), (own, other));
        }
    }

    #[test]
    fn empty_graph() {
        let e = build_electorate(20, 10).unwrap();
        let bp = BlockProbs::new(0.0, 0.0).unwrap();
        let counts = sample_counts_homogeneous(&e, bp, 11);
        assert!(counts.same_counts().iter().chain(counts.other_counts()).all(|&c| c == 0));
        let counts = sample_counts_edgewise(&e, bp, None, 11).unwrap();
        assert!(counts.same_counts().iter().chain(counts.other_counts()).all(|&c| c == 0));
    }

    #[test]
    fn homogeneous_means_match_binomial() {
        // per-voter means (n1-1)p = 1559.7 and n2 q = 960 over 10^4 voter draws
        let e = build_electorate(5200, 4800).unwrap();
        let bp = BlockProbs::new(0.3, 0.2).unwrap();
        let mut same = Vec::new();
        let mut other = Vec::new();
        for seed in 0..2 {
            let c = sample_counts_homogeneous(&e, bp, seed);
            for v in e.voters(Class::H1) {
                same.push(f64::from(c.same(v)));
                other.push(f64::from(c.other(v)));
            }
        }
        let k = same.len() as f64;
        let mean_same = same.iter().sum::<f64>() / k;
        let mean_other = other.iter().sum::<f64>() / k;
        let se_same = (5199.0 * 0.3 * 0.7 / k).sqrt();
        let se_other = (4800.0 * 0.2 * 0.8 / k).sqrt();
        assert!((mean_same - 1559.7).abs() < 3.0 * se_same, "{mean_same}");
        assert!((mean_other - 960.0).abs() < 3.0 * se_other, "{mean_other}");
    }

    #[test]
    fn counts_stay_in_range() {
        let e = build_electorate(30, 20).unwrap();
        let bp = BlockProbs::new(0.6, 0.4).unwrap();
        for seed in 0..20 {
            let c = sample_counts_edgewise(&e, bp, None, seed).unwrap();
            for v in 0..50 {
                let class = e.class_of(v);
                assert!((c.same(v) as usize) < e.class_size(class));
                assert!(c.other(v) as usize <= e.class_size(class.other()));
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_samples() {
        let e = build_electorate(700, 500).unwrap();
        let bp = BlockProbs::new(0.2, 0.1).unwrap();
        let positions: Vec<Position> = (0..1200)
            .map(|v| Position::new(50.0 + (v % 37) as f64 * 0.1, -3.0 + (v % 11) as f64 * 0.2).unwrap())
            .collect();
        let gk = GeoKernel::new(0.1, positions).unwrap();
        let run = |threads: usize| {
            pool(threads).install(|| {
                (
                    sample_counts_homogeneous(&e, bp, 99),
                    sample_counts_edgewise(&e, bp, None, 99).unwrap(),
                    sample_counts_edgewise(&e, bp, Some(&gk), 99).unwrap(),
                )
            })
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(7));
    }

    #[test]
    fn observation_is_directed() {
        // voters 0 and 1 share a class; voter 2 is unreachable (q = 0).
        // n_same of voter 0 says whether 0 -> 1, of voter 1 whether 1 -> 0.
        let e = build_electorate(2, 1).unwrap();
        let bp = BlockProbs::new(0.5, 0.0).unwrap();
        let mut joint = [[0u32; 2]; 2];
        for seed in 0..4000 {
            let c = sample_counts_edgewise(&e, bp, None, seed).unwrap();
            joint[c.same(0) as usize][c.same(1) as usize] += 1;
            assert_eq!(c.same(2), 0);
        }
        // independent fair coins: each cell ~1000, sd ~27
        for row in joint {
            for cell in row {
                assert!((cell as i64 - 1000).abs() < 150, "{joint:?}");
            }
        }
    }

    #[test]
    fn distant_sites_rarely_connect() {
        // two sites 1000 km apart at weight 0.1/km: factor e^-100
        let e = build_electorate(10, 10).unwrap();
        let a = Position::new(50.0, 0.0).unwrap();
        let b = Position::new(50.0 + 1000.0 / 111.194_926_644_558_73, 0.0).unwrap();
        let positions: Vec<Position> = (0..20).map(|v| if v % 2 == 0 { a } else { b }).collect();
        let gk = GeoKernel::new(0.1, positions).unwrap();
        let bp = BlockProbs::new(1.0, 1.0).unwrap();
        let c = sample_counts_edgewise(&e, bp, Some(&gk), 5).unwrap();
        // each voter sees exactly the other 9 voters at its own site
        for v in 0..20 {
            assert_eq!(c.same(v) + c.other(v), 9);
        }
    }

    #[test]
    fn backend_selection() {
        let e = build_electorate(3, 2).unwrap();
        let bp = BlockProbs::new(0.5, 0.1).unwrap();
        let gk = GeoKernel::new(0.1, vec![Position::new(0.0, 0.0).unwrap(); 5]).unwrap();
        assert!(matches!(
            NetworkSampler::new(&e, bp, None, Backend::Auto).unwrap(),
            NetworkSampler::Homogeneous(_)
        ));
        assert!(matches!(
            NetworkSampler::new(&e, bp, Some(&gk), Backend::Auto).unwrap(),
            NetworkSampler::Edgewise(_)
        ));
        assert!(NetworkSampler::new(&e, bp, Some(&gk), Backend::Homogeneous).is_err());
        let short = GeoKernel::new(0.1, vec![Position::new(0.0, 0.0).unwrap(); 4]).unwrap();
        assert!(EdgewiseSampler::new(&e, bp, Some(&short)).is_err());
    }
}
