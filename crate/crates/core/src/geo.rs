//! Coordinates and distances in statute miles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Mean Earth radius in statute miles.
pub const EARTH_RADIUS_MILES: f64 = 3958.8;

/// Statute miles per degree for the planar approximation.
pub const MILES_PER_DEGREE: f64 = 69.0;

/// Bounding box of the 48 conterminous states, `(min, max)`.
pub const CONTERMINOUS_LAT: (f64, f64) = (24.4, 49.5);
pub const CONTERMINOUS_LON: (f64, f64) = (-125.0, -66.9);

/// A latitude/longitude pair in decimal degrees.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, CoreError> {
        if !lat.is_finite() || !lon.is_finite() || !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(CoreError::InvalidCoordinate { lat, lon });
        }
        Ok(Self { lat, lon })
    }

    #[inline]
    pub fn lat(&self) -> f64 {
        self.lat
    }

    #[inline]
    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// Position on the unit sphere. Chord length between two such vectors is
    /// strictly increasing in central angle.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (lat, lon) = (self.lat.to_radians(), self.lon.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }
}

impl<'de> Deserialize<'de> for GeoPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lat: f64,
            lon: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        GeoPoint::new(raw.lat, raw.lon).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.lat, self.lon)
    }
}

/// A non-negative, finite distance in statute miles.
#[derive(Copy, Clone, Debug, Default, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Miles(f64);

impl Miles {
    pub const ZERO: Miles = Miles(0.0);

    pub fn new(value: f64) -> Result<Self, CoreError> {
        if value.is_finite() && value >= 0.0 {
            // normalizes -0.0
            Ok(Miles(value + 0.0))
        } else {
            Err(CoreError::InvalidDistance(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn total_cmp(&self, other: &Miles) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl<'de> Deserialize<'de> for Miles {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Miles::new(f64::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl std::ops::Add for Miles {
    type Output = Miles;
    fn add(self, rhs: Miles) -> Miles {
        Miles(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Miles {
    fn add_assign(&mut self, rhs: Miles) {
        self.0 += rhs.0;
    }
}

impl fmt::Display for Miles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Distance function used by sourcing and the spatial index.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    #[serde(alias = "great-circle", alias = "great_circle")]
    Greatcircle,
    Planar,
}

impl Metric {
    #[inline]
    pub fn distance(self, a: GeoPoint, b: GeoPoint) -> Miles {
        match self {
            Metric::Greatcircle => great_circle_miles(a, b),
            Metric::Planar => planar_degree_miles(a, b),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "greatcircle" | "great-circle" | "great_circle" | "haversine" => Ok(Metric::Greatcircle),
            "planar" | "euclidean" => Ok(Metric::Planar),
            other => Err(CoreError::UnknownMetric(other.to_string())),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Greatcircle => "greatcircle",
            Metric::Planar => "planar",
        })
    }
}

/// Haversine distance on a sphere of radius [`EARTH_RADIUS_MILES`].
pub fn great_circle_miles(a: GeoPoint, b: GeoPoint) -> Miles {
    let d_lat = (b.lat - a.lat).to_radians();
    let d_lon = (b.lon - a.lon).to_radians();
    let h = (d_lat * 0.5).sin().powi(2)
        + a.lat.to_radians().cos() * b.lat.to_radians().cos() * (d_lon * 0.5).sin().powi(2);
    Miles(2.0 * EARTH_RADIUS_MILES * h.sqrt().min(1.0).asin())
}

/// Equirectangular approximation: degrees scaled by cos(mean latitude),
/// times [`MILES_PER_DEGREE`]. Not valid across the antimeridian.
pub fn planar_degree_miles(a: GeoPoint, b: GeoPoint) -> Miles {
    let d_lat = b.lat - a.lat;
    let d_lon = (b.lon - a.lon) * ((a.lat + b.lat) * 0.5).to_radians().cos();
    Miles((d_lat * d_lat + d_lon * d_lon).sqrt() * MILES_PER_DEGREE)
}

pub fn in_conterminous_us(p: GeoPoint) -> bool {
    (CONTERMINOUS_LAT.0..=CONTERMINOUS_LAT.1).contains(&p.lat)
        && (CONTERMINOUS_LON.0..=CONTERMINOUS_LON.1).contains(&p.lon)
}

/// Converts a chord length on the unit sphere to great-circle miles.
#[inline]
pub(crate) fn chord_to_miles(chord: f64) -> f64 {
    2.0 * EARTH_RADIUS_MILES * (chord * 0.5).clamp(0.0, 1.0).asin()
}
