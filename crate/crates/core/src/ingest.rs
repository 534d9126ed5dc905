//! Region-level vote tallies joined with region coordinates, and
//! sub-electorates drawn from the pooled ballots.
//!
//! Votes CSV: `region_id,votes_a1,votes_a2`. Coordinates CSV:
//! `region_id,lat,lon`. Every sampled voter sits at their region's
//! coordinates.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};

use crate::electorate::{Class, Electorate};
use crate::error::{Error, Result};
use crate::netgen::Position;

#[derive(Clone, Debug, PartialEq)]
pub struct RegionRecord {
    pub region_id: String,
    pub votes_a1: u64,
    pub votes_a2: u64,
    pub position: Position,
}

impl RegionRecord {
    pub fn total(&self) -> u64 {
        self.votes_a1 + self.votes_a2
    }
}

/// Which votes column plays the role of candidate `a1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A1Column {
    #[default]
    VotesA1,
    VotesA2,
}

pub fn apply_mapping(mut records: Vec<RegionRecord>, mapping: A1Column) -> Vec<RegionRecord> {
    if mapping == A1Column::VotesA2 {
        for r in &mut records {
            std::mem::swap(&mut r.votes_a1, &mut r.votes_a2);
        }
    }
    records
}

#[derive(Debug, Deserialize)]
struct VotesRow {
    region_id: String,
    votes_a1: u64,
    votes_a2: u64,
}

#[derive(Debug, Deserialize)]
struct CoordsRow {
    region_id: String,
    lat: f64,
    lon: f64,
}

fn data_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, expected_header: &[&str]) -> Result<Vec<(u64, T)>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| data_err(path, format!("unreadable header: {e}")))?
        .clone();
    if header.iter().collect::<Vec<_>>() != expected_header {
        return Err(data_err(
            path,
            format!("expected header `{}`, found `{}`", expected_header.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            data_err(path, format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: T = record
            .deserialize(Some(&header))
            .map_err(|e| data_err(path, format!("line {line}: {e}")))?;
        rows.push((line, row));
    }
    Ok(rows)
}

/// Loads and joins the two files, keeping the order of the votes file.
pub fn load_regions(votes_path: &Path, coords_path: &Path) -> Result<Vec<RegionRecord>> {
    let votes: Vec<(u64, VotesRow)> = read_rows(votes_path, &["region_id", "votes_a1", "votes_a2"])?;
    let coords: Vec<(u64, CoordsRow)> = read_rows(coords_path, &["region_id", "lat", "lon"])?;

    let mut positions = HashMap::new();
    for (line, row) in coords {
        let pos = Position::new(row.lat, row.lon)
            .map_err(|e| data_err(coords_path, format!("line {line}: region {}: {e}", row.region_id)))?;
        if positions.insert(row.region_id.clone(), pos).is_some() {
            return Err(data_err(coords_path, format!("line {line}: duplicate region_id {}", row.region_id)));
        }
    }

    let mut seen = HashSet::new();
    let mut missing = Vec::new();
    let mut records = Vec::with_capacity(votes.len());
    for (line, row) in votes {
        if !seen.insert(row.region_id.clone()) {
            return Err(data_err(votes_path, format!("line {line}: duplicate region_id {}", row.region_id)));
        }
        if row.votes_a1 + row.votes_a2 == 0 {
            return Err(data_err(votes_path, format!("line {line}: region {} has no votes", row.region_id)));
        }
        match positions.get(&row.region_id) {
            Some(&position) => records.push(RegionRecord {
                region_id: row.region_id,
                votes_a1: row.votes_a1,
                votes_a2: row.votes_a2,
                position,
            }),
            None => missing.push(row.region_id),
        }
    }
    if !missing.is_empty() {
        return Err(data_err(
            coords_path,
            format!("no coordinates for region(s): {}", missing.join(", ")),
        ));
    }
    Ok(records)
}

/// Number of marked items in `k` draws without replacement from `pool` items,
/// `marked` of them marked. Falls back to inversion from a log-space start when
/// the library's own inversion start underflows (very large pools, small means).
fn hypergeometric<R: Rng>(rng: &mut R, pool: u64, marked: u64, k: u64) -> u64 {
    if let Ok(h) = Hypergeometric::new(pool, marked, k) {
        return h.sample(rng);
    }
    hypergeometric_inversion(rng, pool, marked, k)
}

fn hypergeometric_inversion<R: Rng>(rng: &mut R, pool: u64, marked: u64, k: u64) -> u64 {
    if k > pool / 2 {
        return marked - hypergeometric_inversion(rng, pool, marked, pool - k);
    }
    if marked > pool - marked {
        return k - hypergeometric_inversion(rng, pool, pool - marked, k);
    }
    let unmarked = pool - marked;
    // ln P(X = 0) = sum over draws of ln(1 - marked / remaining)
    let ln_p0: f64 = (0..k.min(unmarked + 1))
        .map(|i| (-(marked as f64) / (pool - i) as f64).ln_1p())
        .sum();
    let hi = marked.min(k);
    let mut u: f64 = rng.random();
    let mut x = 0;
    let mut px = ln_p0.exp();
    while x < hi && u > px {
        u -= px;
        px *= (marked - x) as f64 * (k - x) as f64 / ((x + 1) as f64 * (unmarked + x + 1 - k) as f64);
        x += 1;
    }
    x
}

/// A sampled sub-electorate with each voter's position and home region.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledElectorate {
    pub electorate: Electorate,
    pub positions: Vec<Position>,
    source_region: Vec<u32>,
    region_ids: Vec<String>,
}

impl SampledElectorate {
    pub fn region_of(&self, voter: usize) -> &str {
        &self.region_ids[self.source_region[voter] as usize]
    }

    /// Number of sampled voters per region, in the input order.
    pub fn region_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.region_ids.len()];
        for &r in &self.source_region {
            counts[r as usize] += 1;
        }
        counts
    }
}

/// Draws `k` ballots without replacement from all ballots pooled across
/// regions. The draw is a multivariate hypergeometric over the
/// region × option cells, done one cell at a time, so no ballot is ever
/// materialised.
pub fn sample_voters(records: &[RegionRecord], k: usize, seed: u64) -> Result<SampledElectorate> {
    let total: u64 = records.iter().map(RegionRecord::total).sum();
    if k as u64 > total {
        return Err(Error::Data {
            path: Default::default(),
            message: format!("sample size {k} exceeds the {total} ballots available"),
        });
    }
    if k == 0 {
        return Err(Error::Electorate("sample size must be at least 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining_pool = total;
    let mut remaining_k = k as u64;
    let mut drawn = Vec::with_capacity(records.len());
    for r in records {
        let mut cell = [0u64; 2];
        for (slot, votes) in [r.votes_a1, r.votes_a2].into_iter().enumerate() {
            let x = if remaining_k == 0 || votes == 0 {
                0
            } else if votes == remaining_pool {
                remaining_k
            } else {
                hypergeometric(&mut rng, remaining_pool, votes, remaining_k)
            };
            cell[slot] = x;
            remaining_pool -= votes;
            remaining_k -= x;
        }
        drawn.push(cell);
    }
    debug_assert_eq!(remaining_k, 0);

    let n1: u64 = drawn.iter().map(|c| c[0]).sum();
    let n2: u64 = drawn.iter().map(|c| c[1]).sum();
    let electorate = Electorate::new(n1 as usize, n2 as usize)?;
    let mut positions = Vec::with_capacity(k);
    let mut source_region = Vec::with_capacity(k);
    for class in [Class::H1, Class::H2] {
        let slot = usize::from(class == Class::H2);
        for (idx, (r, cell)) in records.iter().zip(&drawn).enumerate() {
            for _ in 0..cell[slot] {
                positions.push(r.position);
                source_region.push(idx as u32);
            }
        }
    }
    Ok(SampledElectorate {
        electorate,
        positions,
        source_region,
        region_ids: records.iter().map(|r| r.region_id.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_se;

    #[test]
    fn inversion_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (pool, marked, k) in [(1000u64, 30u64, 100u64), (1000, 970, 100), (1000, 30, 900)] {
            let xs: Vec<f64> = (0..20_000)
                .map(|_| hypergeometric_inversion(&mut rng, pool, marked, k) as f64)
                .collect();
            let (m, se) = mean_se(&xs);
            let mean = (k * marked) as f64 / pool as f64;
            let f = |x: u64| x as f64;
            let var = mean * (1.0 - f(marked) / f(pool)) * f(pool - k) / f(pool - 1);
            assert!((m - mean).abs() < 4.0 * se, "{pool} {marked} {k}: {m} vs {mean}");
            let sample_var = se * se * xs.len() as f64;
            assert!((sample_var / var - 1.0).abs() < 0.05, "{sample_var} vs {var}");
        }
    }

    #[test]
    fn huge_pool_small_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..4000)
            .map(|_| hypergeometric(&mut rng, 33_000_000, 20_000, 10_000) as f64)
            .collect();
        let (m, se) = mean_se(&xs);
        let mean = 10_000.0 * 20_000.0 / 33_000_000.0;
        assert!((m - mean).abs() < 4.0 * se, "{m} vs {mean}");
    }
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn csv_file(contents: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn toy() -> (NamedTempFile, NamedTempFile) {
        (
            csv_file("region_id,votes_a1,votes_a2\nA,60,40\nB,30,70\n"),
            csv_file("region_id,lat,lon\nB,53.4,-2.2\nA,51.5,-0.1\n"),
        )
    }

    #[test]
    fn toy_join_preserves_totals() {
        let (v, c) = toy();
        let recs = load_regions(v.path(), c.path()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs.iter().map(|r| r.votes_a1).sum::<u64>(), 90);
        assert_eq!(recs.iter().map(|r| r.votes_a2).sum::<u64>(), 110);
        assert_eq!(recs[0].position, Position::new(51.5, -0.1).unwrap());
    }

    #[test]
    fn missing_coordinates_named() {
        let v = csv_file("region_id,votes_a1,votes_a2\nA,1,2\nB,3,4\nC,5,6\n");
        let c = csv_file("region_id,lat,lon\nA,51.5,-0.1\n");
        let msg = load_regions(v.path(), c.path()).unwrap_err().to_string();
        assert!(msg.contains("B, C"), "{msg}");
    }

    #[test]
    fn duplicates_rejected() {
        let v = csv_file("region_id,votes_a1,votes_a2\nA,1,2\nA,3,4\n");
        let c = csv_file("region_id,lat,lon\nA,51.5,-0.1\n");
        let msg = load_regions(v.path(), c.path()).unwrap_err().to_string();
        assert!(msg.contains("line 3") && msg.contains("duplicate"), "{msg}");

        let v = csv_file("region_id,votes_a1,votes_a2\nA,1,2\n");
        let c = csv_file("region_id,lat,lon\nA,51.5,-0.1\nA,52.0,-0.1\n");
        assert!(load_regions(v.path(), c.path()).is_err());
    }

    #[test]
    fn malformed_rows_report_line() {
        let v = csv_file("region_id,votes_a1,votes_a2\nA,1,2\nB,x,4\n");
        let c = csv_file("region_id,lat,lon\nA,51.5,-0.1\nB,52.0,-0.1\n");
        let msg = load_regions(v.path(), c.path()).unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");

        let c = csv_file("region_id,lat,lon\nA,51.5,-0.1\nB,95.0,-0.1\n");
        let v = csv_file("region_id,votes_a1,votes_a2\nA,1,2\nB,3,4\n");
        let msg = load_regions(v.path(), c.path()).unwrap_err().to_string();
        assert!(msg.contains("line 3") && msg.contains("coordinates"), "{msg}");

        let v = csv_file("region,votes_a1,votes_a2\nA,1,2\n");
        assert!(load_regions(v.path(), c.path()).is_err());

        let v = csv_file("region_id,votes_a1,votes_a2\nA,0,0\n");
        assert!(load_regions(v.path(), c.path()).is_err());
    }

    #[test]
    fn exhaustive_sample_is_the_dataset() {
        let (v, c) = toy();
        let recs = load_regions(v.path(), c.path()).unwrap();
        let s = sample_voters(&recs, 200, 1).unwrap();
        assert_eq!((s.electorate.n1(), s.electorate.n2()), (90, 110));
        assert_eq!(s.electorate.margin().value(), (90.0 - 110.0) / 400.0);
        assert_eq!(s.region_counts(), vec![100, 100]);
    }

    #[test]
    fn oversized_sample_rejected() {
        let (v, c) = toy();
        let recs = load_regions(v.path(), c.path()).unwrap();
        assert!(sample_voters(&recs, 201, 1).is_err());
    }

    #[test]
    fn unanimous_region() {
        let recs = vec![RegionRecord {
            region_id: "X".into(),
            votes_a1: 1000,
            votes_a2: 0,
            position: Position::new(50.0, 0.0).unwrap(),
        }];
        for k in [1, 17, 1000] {
            let s = sample_voters(&recs, k, 3).unwrap();
            assert_eq!((s.electorate.n1(), s.electorate.n2()), (k, 0));
        }
    }

    #[test]
    fn voters_sit_at_their_region() {
        let (v, c) = toy();
        let recs = load_regions(v.path(), c.path()).unwrap();
        let s = sample_voters(&recs, 50, 8).unwrap();
        assert_eq!(s.positions.len(), 50);
        for voter in 0..50 {
            let region = recs.iter().find(|r| r.region_id == s.region_of(voter)).unwrap();
            assert_eq!(s.positions[voter], region.position);
        }
        assert_eq!(sample_voters(&recs, 50, 8).unwrap(), s);
    }

    #[test]
    fn mapping_swaps_columns() {
        let (v, c) = toy();
        let recs = apply_mapping(load_regions(v.path(), c.path()).unwrap(), A1Column::VotesA2);
        assert_eq!((recs[0].votes_a1, recs[0].votes_a2), (40, 60));
        let s = sample_voters(&recs, 200, 1).unwrap();
        assert_eq!(s.electorate.n1(), 110);
    }
}
