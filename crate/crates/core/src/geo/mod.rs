//! Administrative regions (province, regency, district, village) keyed by
//! dotted numeric codes, with the attribute table kept apart from the
//! GeoJSON geometry it joins to.

mod code;
mod registry;

use serde::Serialize;

pub use code::{RegionCode, RegionLevel};
pub use registry::{ImportSummary, RegionRecord, Registry, SharedRegistry, CODE_PROPERTY};

/// Synthetic sample regions shipped with the repository.
pub const SAMPLE_ATTRIBUTES: &str = include_str!("../../../../fixtures/regions/regions.csv");
pub const SAMPLE_GEOMETRY: &str = include_str!("../../../../fixtures/regions/regions.geojson");

/// Longitude/latitude bounds of Lampung province (103°40'–105°50' E, 3°45'–6°45' S).
pub const LAMPUNG_EXTENT: Extent = Extent {
    min_lon: 103.0 + 40.0 / 60.0,
    min_lat: -(6.0 + 45.0 / 60.0),
    max_lon: 105.0 + 50.0 / 60.0,
    max_lat: -(3.0 + 45.0 / 60.0),
};

/// Loads the shipped sample registry.
pub fn sample_registry() -> Registry {
    Registry::import(SAMPLE_ATTRIBUTES.as_bytes(), SAMPLE_GEOMETRY.as_bytes())
        .expect("shipped fixture is valid")
        .0
}

#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    #[error("malformed region code `{code}`: {reason}")]
    InvalidCode { code: String, reason: &'static str },
    #[error("region `{0}` not found")]
    NotFound(RegionCode),
    #[error("region `{0}` has no geometry")]
    GeometryAbsent(RegionCode),
    #[error("region `{code}` has no parent `{parent}` in the attribute table")]
    MissingParent { code: RegionCode, parent: RegionCode },
    #[error("line {line}: duplicate region code `{code}`")]
    DuplicateCode { code: RegionCode, line: usize },
    #[error("line {line}: region `{code}` has a blank name")]
    BlankName { code: RegionCode, line: usize },
    #[error("attribute table lacks a `{0}` column")]
    MissingColumn(&'static str),
    #[error("attribute table: {0}")]
    Csv(#[from] csv::Error),
    #[error("geometry: {0}")]
    GeoJson(Box<geojson::Error>),
    #[error("geometry source must be a FeatureCollection")]
    NotFeatureCollection,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<geojson::Error> for GeoError {
    fn from(e: geojson::Error) -> Self {
        GeoError::GeoJson(Box::new(e))
    }
}

/// Axis-aligned longitude/latitude box (WGS84 degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extent {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl Extent {
    pub fn union(&self, other: &Extent) -> Extent {
        Extent {
            min_lon: self.min_lon.min(other.min_lon),
            min_lat: self.min_lat.min(other.min_lat),
            max_lon: self.max_lon.max(other.max_lon),
            max_lat: self.max_lat.max(other.max_lat),
        }
    }

    pub fn within(&self, outer: &Extent) -> bool {
        self.min_lon >= outer.min_lon
            && self.max_lon <= outer.max_lon
            && self.min_lat >= outer.min_lat
            && self.max_lat <= outer.max_lat
    }

    pub fn of_geometry(geometry: &geojson::Geometry) -> Option<Extent> {
        let mut points = Vec::new();
        collect_positions(&geometry.value, &mut points);
        points
            .into_iter()
            .filter(|p| p.len() >= 2)
            .map(|p| Extent {
                min_lon: p[0],
                min_lat: p[1],
                max_lon: p[0],
                max_lat: p[1],
            })
            .reduce(|a, b| a.union(&b))
    }
}

fn collect_positions<'a>(value: &'a geojson::Value, out: &mut Vec<&'a [f64]>) {
    use geojson::Value::*;
    match value {
        Point(p) => out.push(p),
        MultiPoint(ps) | LineString(ps) => out.extend(ps.iter().map(Vec::as_slice)),
        MultiLineString(ls) | Polygon(ls) => out.extend(ls.iter().flatten().map(Vec::as_slice)),
        MultiPolygon(polys) => out.extend(polys.iter().flatten().flatten().map(Vec::as_slice)),
        GeometryCollection(gs) => gs.iter().for_each(|g| collect_positions(&g.value, out)),
    }
}
