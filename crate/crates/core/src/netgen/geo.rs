use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A point on the globe in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    lat: f64,
    lon: f64,
}

impl Position {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(lat.is_finite() && lon.is_finite() && lat.abs() <= 90.0 && lon.abs() <= 180.0) {
            return Err(Error::Coordinates { lat, lon });
        }
        Ok(Position { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub(crate) fn key(&self) -> (u64, u64) {
        (self.lat.to_bits(), self.lon.to_bits())
    }
}

/// Great-circle distance on a sphere of the given radius (haversine form).
pub fn haversine(a: Position, b: Position, radius: f64) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * radius * h.sqrt().min(1.0).asin()
}

/// Great-circle distance in kilometres.
pub fn pair_distance(a: Position, b: Position) -> f64 {
    haversine(a, b, EARTH_RADIUS_KM)
}

/// Distance decay `exp(−weight × distance)` applied on top of the block
/// probabilities. `radius` sets the distance unit: the default Earth radius
/// gives kilometres, `180/π` gives degrees of arc.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoKernel {
    weight: f64,
    radius: f64,
    positions: Vec<Position>,
}

impl GeoKernel {
    pub fn new(weight: f64, positions: Vec<Position>) -> Result<Self> {
        Self::with_radius(weight, EARTH_RADIUS_KM, positions)
    }

    pub fn with_radius(weight: f64, radius: f64, positions: Vec<Position>) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::Network(format!("geo weight must be >= 0, got {weight}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Network(format!("sphere radius must be > 0, got {radius}")));
        }
        Ok(GeoKernel {
            weight,
            radius,
            positions,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn distance(&self, a: Position, b: Position) -> f64 {
        haversine(a, b, self.radius)
    }

    /// The factor `p_dist` between two positions, in `(0, 1]`.
    pub fn factor(&self, a: Position, b: Position) -> f64 {
        (-self.weight * self.distance(a, b)).exp()
    }
}
