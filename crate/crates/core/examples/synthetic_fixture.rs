//! Writes the bundled 382-region fixture: `votes.csv` and `coords.csv`.
//!
//! Regions cluster around UK-like urban centres with a rural remainder,
//! about 33 million votes in total and a national a1 share near 51.9%.
//!
//! ```text
//! cargo run --example synthetic_fixture -- crates/core/fixtures
//! ```

use std::error::Error;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

const REGIONS: usize = 382;
const SEED: u64 = 20160623;

/// (lat, lon, spread in degrees, region count, a1 share offset)
const CENTRES: [(f64, f64, f64, usize, f64); 12] = [
    (51.51, -0.13, 0.12, 33, -0.12),
    (52.48, -1.90, 0.20, 14, 0.03),
    (53.48, -2.24, 0.22, 16, -0.01),
    (53.80, -1.55, 0.25, 14, 0.02),
    (54.97, -1.61, 0.25, 10, 0.03),
    (53.41, -2.98, 0.15, 8, -0.03),
    (55.86, -4.25, 0.25, 12, -0.17),
    (55.95, -3.19, 0.15, 6, -0.20),
    (51.45, -2.59, 0.20, 8, -0.04),
    (51.48, -3.18, 0.20, 8, 0.00),
    (52.95, -1.15, 0.20, 9, 0.06),
    (54.60, -5.93, 0.30, 11, -0.07),
];

/// Rough land boxes for the rural remainder: (lat_lo, lat_hi, lon_lo, lon_hi, weight, offset).
const RURAL: [(f64, f64, f64, f64, f64, f64); 4] = [
    (50.3, 53.0, -4.5, 1.6, 0.55, 0.05),
    (53.0, 55.0, -3.2, -0.2, 0.25, 0.06),
    (55.0, 58.4, -5.2, -2.2, 0.12, -0.14),
    (51.7, 53.3, -4.5, -3.0, 0.08, 0.01),
];

fn main() -> Result<(), Box<dyn Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures".into()));
    std::fs::create_dir_all(&out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let size: LogNormal<f64> = LogNormal::new(11.27, 0.38)?;
    let share_noise: Normal<f64> = Normal::new(0.0, 0.06)?;

    let mut regions: Vec<(f64, f64, f64)> = Vec::with_capacity(REGIONS);
    for &(lat, lon, spread, count, offset) in &CENTRES {
        let jitter = Normal::new(0.0, spread)?;
        for _ in 0..count {
            let lat = lat + jitter.sample(&mut rng);
            let lon = lon + jitter.sample(&mut rng) * 1.6;
            regions.push((lat, lon, offset));
        }
    }
    let total_w: f64 = RURAL.iter().map(|r| r.4).sum();
    while regions.len() < REGIONS {
        let mut pick = rng.random::<f64>() * total_w;
        let mut chosen = RURAL[RURAL.len() - 1];
        for r in RURAL {
            if pick < r.4 {
                chosen = r;
                break;
            }
            pick -= r.4;
        }
        let (lat_lo, lat_hi, lon_lo, lon_hi, _, offset) = chosen;
        regions.push((
            rng.random_range(lat_lo..lat_hi),
            rng.random_range(lon_lo..lon_hi),
            offset,
        ));
    }

    let mut votes = BufWriter::new(File::create(out.join("votes.csv"))?);
    let mut coords = BufWriter::new(File::create(out.join("coords.csv"))?);
    writeln!(votes, "region_id,votes_a1,votes_a2")?;
    writeln!(coords, "region_id,lat,lon")?;
    let (mut a1_total, mut all_total) = (0u64, 0u64);
    for (i, &(lat, lon, offset)) in regions.iter().enumerate() {
        let id = format!("R{:03}", i + 1);
        let total = size.sample(&mut rng).round().max(2000.0) as u64;
        let share = (0.521 + offset + share_noise.sample(&mut rng)).clamp(0.2, 0.8);
        let a1 = (total as f64 * share).round() as u64;
        a1_total += a1;
        all_total += total;
        writeln!(votes, "{id},{a1},{}", total - a1)?;
        writeln!(coords, "{id},{lat:.4},{lon:.4}")?;
    }
    votes.flush()?;
    coords.flush()?;
    println!(
        "{REGIONS} regions, {all_total} votes, a1 share {:.4}",
        a1_total as f64 / all_total as f64
    );
    Ok(())
}
