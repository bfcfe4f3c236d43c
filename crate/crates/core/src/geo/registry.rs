use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::{Arc, RwLock};

use geojson::{Feature, GeoJson, Geometry, JsonObject, Value};
use serde::{Deserialize, Serialize};

use super::{Extent, GeoError, RegionCode, RegionLevel};

/// Feature property carrying the region code in geometry sources.
pub const CODE_PROPERTY: &str = "code";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub code: RegionCode,
    pub name: String,
    pub level: RegionLevel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry_ref: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<RegionCode>,
}

#[derive(Debug, Deserialize)]
struct AttributeRow {
    code: String,
    name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportSummary {
    pub imported: usize,
    pub with_geometry: usize,
    /// Geometry features skipped because no attribute row carries their code.
    pub orphan_features: Vec<String>,
}

/// Read-only region hierarchy with optional per-region geometry.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    records: BTreeMap<RegionCode, RegionRecord>,
    geometry: BTreeMap<RegionCode, Geometry>,
    extent: Option<Extent>,
}

impl Registry {
    /// Imports an attribute table (`code,name`) together with a GeoJSON
    /// FeatureCollection whose features carry a `code` property.
    pub fn import<A: Read, G: Read>(attributes: A, geometry: G) -> Result<(Self, ImportSummary), GeoError> {
        let mut registry = Self::from_attributes(attributes)?;
        let mut text = String::new();
        let mut geometry = geometry;
        geometry.read_to_string(&mut text)?;
        let summary = registry.attach_geometry(&text)?;
        Ok((registry, summary))
    }

    /// Imports attribute rows only; every record is left without geometry.
    pub fn import_attributes<A: Read>(attributes: A) -> Result<(Self, ImportSummary), GeoError> {
        let registry = Self::from_attributes(attributes)?;
        let summary = ImportSummary {
            imported: registry.len(),
            ..Default::default()
        };
        Ok((registry, summary))
    }

    fn from_attributes<A: Read>(attributes: A) -> Result<Self, GeoError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(attributes);
        let headers = reader.headers()?.clone();
        for required in ["code", "name"] {
            if !headers.iter().any(|h| h == required) {
                return Err(GeoError::MissingColumn(required));
            }
        }
        let mut records = BTreeMap::new();
        for (i, row) in reader.deserialize::<AttributeRow>().enumerate() {
            let row = row?;
            let line = i + 2;
            let code = RegionCode::parse(&row.code)?;
            if row.name.is_empty() {
                return Err(GeoError::BlankName { code, line });
            }
            if records.contains_key(&code) {
                return Err(GeoError::DuplicateCode { code, line });
            }
            let record = RegionRecord {
                level: code.level(),
                parent: code.parent(),
                code: code.clone(),
                name: row.name,
                geometry_ref: None,
            };
            records.insert(code, record);
        }
        for record in records.values() {
            if let Some(parent) = &record.parent {
                if !records.contains_key(parent) {
                    return Err(GeoError::MissingParent {
                        code: record.code.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        Ok(Registry {
            records,
            geometry: BTreeMap::new(),
            extent: None,
        })
    }

    fn attach_geometry(&mut self, text: &str) -> Result<ImportSummary, GeoError> {
        let collection = match text.parse::<GeoJson>()? {
            GeoJson::FeatureCollection(fc) => fc,
            _ => return Err(GeoError::NotFeatureCollection),
        };
        let mut summary = ImportSummary {
            imported: self.records.len(),
            ..Default::default()
        };
        for (i, feature) in collection.features.into_iter().enumerate() {
            let raw = feature.property(CODE_PROPERTY).and_then(|v| {
                v.as_str()
                    .map(str::to_string)
                    .or_else(|| v.as_u64().map(|n| n.to_string()))
            });
            let Some(raw) = raw else {
                summary
                    .orphan_features
                    .push(format!("feature #{i} (no `{CODE_PROPERTY}` property)"));
                continue;
            };
            let code = match RegionCode::parse(&raw) {
                Ok(c) if self.records.contains_key(&c) => c,
                _ => {
                    summary.orphan_features.push(raw);
                    continue;
                }
            };
            let Some(geometry) = feature.geometry else {
                continue;
            };
            let record = self.records.get_mut(&code).expect("checked above");
            record.geometry_ref = Some(code.to_string());
            self.geometry.insert(code, geometry);
        }
        summary.with_geometry = self.geometry.len();
        self.extent = self
            .geometry
            .values()
            .filter_map(Extent::of_geometry)
            .reduce(|a, b| a.union(&b));
        Ok(summary)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// All records in code order.
    pub fn records(&self) -> impl Iterator<Item = &RegionRecord> {
        self.records.values()
    }

    pub fn contains(&self, code: &RegionCode) -> bool {
        self.records.contains_key(code)
    }

    pub fn lookup(&self, code: &RegionCode) -> Result<&RegionRecord, GeoError> {
        self.records
            .get(code)
            .ok_or_else(|| GeoError::NotFound(code.clone()))
    }

    pub fn roots(&self) -> Vec<&RegionRecord> {
        self.records.values().filter(|r| r.parent.is_none()).collect()
    }

    /// Direct children in code order; empty for villages.
    pub fn children(&self, code: &RegionCode) -> Result<Vec<&RegionRecord>, GeoError> {
        self.lookup(code)?;
        Ok(self
            .records
            .values()
            .filter(|r| r.parent.as_ref() == Some(code))
            .collect())
    }

    /// Bounding box over every stored geometry.
    pub fn extent(&self) -> Option<Extent> {
        self.extent
    }

    /// The region as a GeoJSON feature with `code`, `name` and `level`
    /// properties. A region without its own outline is assembled into a
    /// MultiPolygon from the nearest descendants that have one.
    pub fn geometry_of(&self, code: &RegionCode) -> Result<Feature, GeoError> {
        let record = self.lookup(code)?;
        let geometry = match self.geometry.get(code) {
            Some(g) => g.clone(),
            None => {
                let mut polygons = Vec::new();
                self.collect_descendant_polygons(code, &mut polygons);
                if polygons.is_empty() {
                    return Err(GeoError::GeometryAbsent(code.clone()));
                }
                Geometry::new(Value::MultiPolygon(polygons))
            }
        };
        let mut properties = JsonObject::new();
        properties.insert("code".into(), record.code.as_str().into());
        properties.insert("name".into(), record.name.as_str().into());
        properties.insert("level".into(), record.level.to_string().into());
        Ok(Feature {
            bbox: None,
            geometry: Some(geometry),
            id: Some(geojson::feature::Id::String(record.code.to_string())),
            properties: Some(properties),
            foreign_members: None,
        })
    }

    fn collect_descendant_polygons(&self, code: &RegionCode, out: &mut Vec<geojson::PolygonType>) {
        for child in self.records.values().filter(|r| r.parent.as_ref() == Some(code)) {
            match self.geometry.get(&child.code).map(|g| &g.value) {
                Some(Value::Polygon(p)) => out.push(p.clone()),
                Some(Value::MultiPolygon(ps)) => out.extend(ps.iter().cloned()),
                Some(_) => {}
                None => self.collect_descendant_polygons(&child.code, out),
            }
        }
    }

    /// Writes the attribute table back out as `code,name` rows in code order.
    pub fn export_attributes<W: Write>(&self, out: W) -> Result<(), GeoError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["code", "name"])?;
        for r in self.records.values() {
            writer.write_record([r.code.as_str(), r.name.as_str()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// A registry that can be replaced wholesale while readers hold snapshots.
#[derive(Debug, Default)]
pub struct SharedRegistry {
    current: RwLock<Arc<Registry>>,
}

impl SharedRegistry {
    pub fn new(registry: Registry) -> Self {
        SharedRegistry {
            current: RwLock::new(Arc::new(registry)),
        }
    }

    pub fn snapshot(&self) -> Arc<Registry> {
        self.current.read().expect("registry lock poisoned").clone()
    }

    pub fn replace(&self, registry: Registry) {
        *self.current.write().expect("registry lock poisoned") = Arc::new(registry);
    }
}
