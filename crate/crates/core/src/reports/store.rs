use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::StoreError;
use crate::geo::{RegionCode, RegionLevel, Registry};
use crate::knowledge::{Diagnosis, DiseaseSupport, RankedFocal};

/// Schema tag written as the first line of every log.
pub const LOG_SCHEMA: &str = "flockwatch/consultation-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct LogHeader {
    schema: String,
    version: u32,
}

/// A persisted consultation outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsultationReport {
    pub id: u64,
    pub timestamp: DateTime<Utc>,
    pub region: RegionCode,
    pub rules_version: String,
    pub symptom_ids: Vec<String>,
    pub top_focal: Vec<String>,
    pub top_mass: f64,
    pub ranked: Vec<RankedFocal>,
    pub per_disease: Vec<DiseaseSupport>,
    pub conflict_trace: Vec<f64>,
}

impl ConsultationReport {
    /// Diseases tied for the highest plausibility in this consultation.
    pub fn plausibility_leaders(&self) -> Vec<&str> {
        crate::knowledge::plausibility_leaders(&self.per_disease)
    }
}

/// A report before the store assigns its id.
#[derive(Debug, Clone)]
pub struct NewReport {
    pub timestamp: DateTime<Utc>,
    pub region: RegionCode,
    pub diagnosis: Diagnosis,
}

/// Query filter; every field that is set must match.
#[derive(Debug, Clone, Default)]
pub struct ReportFilter {
    /// Region or any of its descendants.
    pub region: Option<RegionCode>,
    pub from: Option<DateTime<Utc>>,
    pub to: Option<DateTime<Utc>>,
    /// Matches reports whose top focal set is exactly this disease.
    pub disease: Option<String>,
}

impl ReportFilter {
    fn matches(&self, r: &ConsultationReport) -> bool {
        self.region.as_ref().is_none_or(|p| r.region.is_within(p))
            && self.from.is_none_or(|f| r.timestamp >= f)
            && self.to.is_none_or(|t| r.timestamp <= t)
            && self
                .disease
                .as_ref()
                .is_none_or(|d| r.top_focal.len() == 1 && &r.top_focal[0] == d)
    }
}

struct Writer {
    file: Option<File>,
    next_id: u64,
}

/// Append-only consultation log.
///
/// Appends are serialized through one writer; readers take immutable
/// snapshots and never block on the file.
pub struct ReportStore {
    path: Option<PathBuf>,
    writer: Mutex<Writer>,
    snapshot: RwLock<Arc<Vec<ConsultationReport>>>,
}

impl ReportStore {
    /// Opens the log at `path`, creating it with a header line if missing.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let reports = if path.exists() && std::fs::metadata(&path)?.len() > 0 {
            read_log(&path)?
        } else {
            let mut file = File::create(&path)?;
            let header = LogHeader {
                schema: LOG_SCHEMA.to_string(),
                version: LOG_VERSION,
            };
            writeln!(file, "{}", serde_json::to_string(&header)?)?;
            file.sync_all()?;
            Vec::new()
        };
        let next_id = reports.iter().map(|r| r.id).max().map_or(1, |m| m + 1);
        let file = OpenOptions::new().append(true).open(&path)?;
        Ok(ReportStore {
            path: Some(path),
            writer: Mutex::new(Writer {
                file: Some(file),
                next_id,
            }),
            snapshot: RwLock::new(Arc::new(reports)),
        })
    }

    /// A store that keeps reports in memory only.
    pub fn in_memory() -> Self {
        ReportStore {
            path: None,
            writer: Mutex::new(Writer {
                file: None,
                next_id: 1,
            }),
            snapshot: RwLock::new(Arc::new(Vec::new())),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Validates `report` against `registry`, assigns the next id and
    /// persists it before it becomes visible to readers.
    pub fn append(&self, report: NewReport, registry: &Registry) -> Result<u64, StoreError> {
        let record = registry
            .lookup(&report.region)
            .map_err(|_| StoreError::UnknownRegion(report.region.clone()))?;
        if record.level < RegionLevel::District {
            return Err(StoreError::RegionTooCoarse {
                region: report.region.clone(),
                level: record.level,
            });
        }
        let d = report.diagnosis;
        if !(d.top_mass > 0.0 && d.top_mass <= 1.0) {
            return Err(StoreError::InvalidReport(format!(
                "top mass {} outside (0, 1]",
                d.top_mass
            )));
        }

        let mut writer = self.writer.lock().expect("report writer poisoned");
        let stored = ConsultationReport {
            id: writer.next_id,
            timestamp: report.timestamp,
            region: report.region,
            rules_version: d.rules_version,
            symptom_ids: d.symptom_ids,
            top_focal: d.top,
            top_mass: d.top_mass,
            ranked: d.ranked,
            per_disease: d.per_disease,
            conflict_trace: d.conflict_trace,
        };
        if let Some(file) = writer.file.as_mut() {
            let mut line = serde_json::to_string(&stored)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.sync_data()?;
        }
        writer.next_id += 1;
        let id = stored.id;
        let mut snap = self.snapshot.write().expect("report snapshot poisoned");
        Arc::make_mut(&mut snap).push(stored);
        Ok(id)
    }

    /// Every stored report in append order.
    pub fn snapshot(&self) -> Arc<Vec<ConsultationReport>> {
        self.snapshot.read().expect("report snapshot poisoned").clone()
    }

    pub fn get(&self, id: u64) -> Option<ConsultationReport> {
        self.snapshot().iter().find(|r| r.id == id).cloned()
    }

    pub fn len(&self) -> usize {
        self.snapshot().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reports matching `filter`, newest first.
    pub fn query(&self, filter: &ReportFilter) -> Result<Vec<ConsultationReport>, StoreError> {
        if let (Some(from), Some(to)) = (filter.from, filter.to) {
            if from > to {
                return Err(StoreError::InvalidFilter(format!(
                    "`from` {from} is after `to` {to}"
                )));
            }
        }
        let mut out: Vec<_> = self
            .snapshot()
            .iter()
            .filter(|r| filter.matches(r))
            .cloned()
            .collect();
        out.sort_by(|a, b| b.timestamp.cmp(&a.timestamp).then(b.id.cmp(&a.id)));
        Ok(out)
    }
}

fn read_log(path: &Path) -> Result<Vec<ConsultationReport>, StoreError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let header_line = match lines.next() {
        Some((_, line)) => line?,
        None => return Ok(Vec::new()),
    };
    let header: LogHeader = serde_json::from_str(&header_line).map_err(|e| StoreError::Corrupt {
        line: 1,
        message: format!("bad header: {e}"),
    })?;
    if header.schema != LOG_SCHEMA || header.version != LOG_VERSION {
        return Err(StoreError::Corrupt {
            line: 1,
            message: format!("unsupported log schema {} v{}", header.schema, header.version),
        });
    }
    let mut reports = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let report: ConsultationReport = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            line: i + 1,
            message: e.to_string(),
        })?;
        reports.push(report);
    }
    Ok(reports)
}
