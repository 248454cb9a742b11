//! Geometry primitives: point-in-polygon membership, polygon centroids, and
//! great-circle distance. These back the facility spatial join and the
//! centroid-based interpolation baselines.
//!
//! Polygons are stored with implicitly closed rings: the closing vertex is
//! stripped on construction and every edge walk re-inserts it.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Mean Earth radius in kilometres, used by the haversine distance.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Below this absolute shoelace area (square degrees) a ring counts as
/// degenerate.
const AREA_EPS: f64 = 1e-12;

/// Perpendicular distance (degrees) under which a point is considered to lie
/// on a polygon edge.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum GeoError {
    /// Longitude or latitude out of range or non-finite.
    InvalidPoint { lon: f64, lat: f64 },
    /// Ring with fewer than three distinct vertices, zero area, or holes
    /// swallowing the exterior.
    InvalidGeometry(String),
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::InvalidPoint { lon, lat } => {
                write!(f, "invalid point lon={lon} lat={lat}; expected finite degrees in [-180,180] x [-90,90]")
            }
            GeoError::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
        }
    }
}

impl core::error::Error for GeoError {}

/// A longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self, GeoError> {
        if !lon.is_finite() || !lat.is_finite() || !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat)
        {
            return Err(GeoError::InvalidPoint { lon, lat });
        }
        Ok(GeoPoint { lon, lat })
    }
}

/// Simple polygon with optional holes. Rings are implicitly closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    exterior: Vec<GeoPoint>,
    holes: Vec<Vec<GeoPoint>>,
}

impl Polygon {
    /// Builds a polygon, normalizing explicitly closed rings (first vertex
    /// repeated at the end) to the implicit form. Rejects rings with fewer
    /// than three distinct vertices and exteriors with zero planar area.
    pub fn new(exterior: Vec<GeoPoint>, holes: Vec<Vec<GeoPoint>>) -> Result<Self, GeoError> {
        let exterior = normalize_ring(exterior, "exterior")?;
        if math::abs(ring_area(&exterior)) <= AREA_EPS {
            return Err(GeoError::InvalidGeometry(String::from(
                "exterior ring has zero planar area",
            )));
        }
        let holes = holes
            .into_iter()
            .map(|h| normalize_ring(h, "hole"))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polygon { exterior, holes })
    }

    pub fn exterior(&self) -> &[GeoPoint] {
        &self.exterior
    }

    pub fn holes(&self) -> &[Vec<GeoPoint>] {
        &self.holes
    }

    /// Axis-aligned bounding box of the exterior ring as
    /// `(min_lon, min_lat, max_lon, max_lat)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut min_lon = f64::INFINITY;
        let mut min_lat = f64::INFINITY;
        let mut max_lon = f64::NEG_INFINITY;
        let mut max_lat = f64::NEG_INFINITY;
        for p in &self.exterior {
            min_lon = min_lon.min(p.lon);
            min_lat = min_lat.min(p.lat);
            max_lon = max_lon.max(p.lon);
            max_lat = max_lat.max(p.lat);
        }
        (min_lon, min_lat, max_lon, max_lat)
    }
}

fn normalize_ring(mut ring: Vec<GeoPoint>, what: &str) -> Result<Vec<GeoPoint>, GeoError> {
    if ring.len() >= 2 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(GeoError::InvalidGeometry(alloc::format!(
            "{what} ring needs at least 3 distinct vertices, got {}",
            ring.len()
        )));
    }
    Ok(ring)
}

/// A polygonal health-service area: the spatial unit of prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Catchment {
    pub id: String,
    pub geometry: Polygon,
    pub population: u64,
    pub area_km2: f64,
}

impl Catchment {
    pub fn new(id: String, geometry: Polygon, population: u64, area_km2: f64) -> Result<Self, GeoError> {
        if !(area_km2 > 0.0) || !area_km2.is_finite() {
            return Err(GeoError::InvalidGeometry(alloc::format!(
                "catchment {id}: area_km2 must be positive, got {area_km2}"
            )));
        }
        Ok(Catchment { id, geometry, population, area_km2 })
    }
}

/// Signed shoelace area of an implicitly closed ring, in square degrees.
fn ring_area(ring: &[GeoPoint]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.lon * b.lat - b.lon * a.lat;
    }
    0.5 * acc
}

/// Shoelace centroid of a single ring together with its absolute area.
fn ring_centroid(ring: &[GeoPoint]) -> (f64, f64, f64) {
    let n = ring.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let cross = a.lon * b.lat - b.lon * a.lat;
        area2 += cross;
        cx += (a.lon + b.lon) * cross;
        cy += (a.lat + b.lat) * cross;
    }
    let area = 0.5 * area2;
    if area == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    (cx / (6.0 * area), cy / (6.0 * area), math::abs(area))
}

fn point_on_ring_edge(p: GeoPoint, ring: &[GeoPoint]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let dx = b.lon - a.lon;
        let dy = b.lat - a.lat;
        let len2 = dx * dx + dy * dy;
        let (px, py) = (p.lon - a.lon, p.lat - a.lat);
        let t = if len2 == 0.0 { 0.0 } else { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) };
        let ex = px - t * dx;
        let ey = py - t * dy;
        if ex * ex + ey * ey <= EDGE_EPS * EDGE_EPS {
            return true;
        }
    }
    false
}

/// Even-odd ray cast against one ring; boundary behaviour is unspecified
/// here and handled by the explicit edge test in [`point_in_polygon`].
fn ray_cast(p: GeoPoint, ring: &[GeoPoint]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.lat > p.lat) != (b.lat > p.lat) {
            let x_int = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
            if p.lon < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

/// True iff `p` lies inside the exterior ring and not strictly inside any
/// hole. Points on any ring edge (exterior or hole) count as inside.
pub fn point_in_polygon(p: GeoPoint, poly: &Polygon) -> bool {
    if point_on_ring_edge(p, &poly.exterior) {
        return true;
    }
    if !ray_cast(p, &poly.exterior) {
        return false;
    }
    for hole in &poly.holes {
        if point_on_ring_edge(p, hole) {
            return true;
        }
        if ray_cast(p, hole) {
            return false;
        }
    }
    true
}

/// Area-weighted planar centroid (shoelace), hole areas subtracted.
pub fn centroid(poly: &Polygon) -> Result<GeoPoint, GeoError> {
    let (ex, ey, ea) = ring_centroid(&poly.exterior);
    let mut num_x = ex * ea;
    let mut num_y = ey * ea;
    let mut net = ea;
    for hole in &poly.holes {
        let (hx, hy, ha) = ring_centroid(hole);
        num_x -= hx * ha;
        num_y -= hy * ha;
        net -= ha;
    }
    if net <= AREA_EPS {
        return Err(GeoError::InvalidGeometry(String::from(
            "polygon has zero net area after subtracting holes",
        )));
    }
    Ok(GeoPoint { lon: num_x / net, lat: num_y / net })
}

/// Great-circle (haversine) distance in kilometres on a 6371 km sphere.
pub fn distance_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let s1 = math::sin(dlat / 2.0);
    let s2 = math::sin(dlon / 2.0);
    let h = s1 * s1 + math::cos(lat1) * math::cos(lat2) * s2 * s2;
    let c = 2.0 * math::atan2(math::sqrt(h), math::sqrt((1.0 - h).max(0.0)));
    EARTH_RADIUS_KM * c
}

/// Distance metric used by the interpolation baselines. Haversine is the
/// default; the planar variant (Euclidean on raw degrees) exists for
/// sensitivity checks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DistanceMetric {
    HaversineKm,
    PlanarDegrees,
}

impl DistanceMetric {
    pub fn distance(self, a: GeoPoint, b: GeoPoint) -> f64 {
        match self {
            DistanceMetric::HaversineKm => distance_km(a, b),
            DistanceMetric::PlanarDegrees => {
                let dx = a.lon - b.lon;
                let dy = a.lat - b.lat;
                math::sqrt(dx * dx + dy * dy)
            }
        }
    }
}
