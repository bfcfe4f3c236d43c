use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use super::{ConsultationReport, StoreError};
use crate::geo::{RegionCode, RegionLevel, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarningLevel {
    None,
    Watch,
    Warning,
}

impl std::str::FromStr for WarningLevel {
    type Err = StoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "watch" => Ok(Self::Watch),
            "warning" => Ok(Self::Warning),
            other => Err(StoreError::InvalidFilter(format!(
                "unknown warning level `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for WarningLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Watch => "watch",
            Self::Warning => "warning",
        })
    }
}

/// When a consultation counts towards an alert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlertPolicy {
    /// The disease being watched.
    pub disease: String,
    /// Minimum mass on the singleton `{disease}` for a warning.
    pub warning_mass: f64,
}

impl Default for AlertPolicy {
    fn default() -> Self {
        AlertPolicy {
            disease: "AI".to_string(),
            warning_mass: 0.5,
        }
    }
}

impl AlertPolicy {
    pub fn validate(&self) -> Result<(), StoreError> {
        if self.disease.trim().is_empty() {
            return Err(StoreError::InvalidPolicy("disease must not be blank".into()));
        }
        if !(self.warning_mass > 0.0 && self.warning_mass <= 1.0) {
            return Err(StoreError::InvalidPolicy(format!(
                "warning_mass {} outside (0, 1]",
                self.warning_mass
            )));
        }
        Ok(())
    }

    /// Level a single report supports on its own.
    ///
    /// `warning`: the top focal set is exactly `{disease}` with at least
    /// `warning_mass`. `watch`: otherwise, the disease is among the
    /// plausibility leaders or inside the top focal set.
    pub fn classify(&self, report: &ConsultationReport) -> WarningLevel {
        let d = self.disease.as_str();
        let top_is_disease = report.top_focal.len() == 1 && report.top_focal[0] == d;
        if top_is_disease && report.top_mass >= self.warning_mass {
            WarningLevel::Warning
        } else if report.plausibility_leaders().contains(&d) || report.top_focal.iter().any(|l| l == d) {
            WarningLevel::Watch
        } else {
            WarningLevel::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningStatus {
    pub region: RegionCode,
    pub name: String,
    pub region_level: RegionLevel,
    pub level: WarningLevel,
    /// Reports in the window at this region or below that support `level`.
    pub supporting_reports: usize,
    pub window_from: DateTime<Utc>,
    pub window_to: DateTime<Utc>,
}

/// Rolls reports up the region hierarchy.
///
/// A report counts when `as_of - window < timestamp <= as_of`. Each region
/// takes the highest level among reports filed at it or any descendant.
/// Every registry region appears in the output, in code order.
pub fn warning_levels(
    reports: &[ConsultationReport],
    registry: &Registry,
    window: Duration,
    as_of: DateTime<Utc>,
    policy: &AlertPolicy,
) -> Result<Vec<WarningStatus>, StoreError> {
    if window <= Duration::zero() {
        return Err(StoreError::InvalidWindow);
    }
    let from = as_of
        .checked_sub_signed(window)
        .ok_or(StoreError::InvalidWindow)?;

    let mut tally: BTreeMap<RegionCode, (WarningLevel, usize)> = BTreeMap::new();
    for report in reports
        .iter()
        .filter(|r| r.timestamp > from && r.timestamp <= as_of)
    {
        let level = policy.classify(report);
        if level == WarningLevel::None {
            continue;
        }
        for code in std::iter::once(report.region.clone()).chain(report.region.ancestors()) {
            let entry = tally.entry(code).or_insert((WarningLevel::None, 0));
            if level > entry.0 {
                *entry = (level, 1);
            } else if level == entry.0 {
                entry.1 += 1;
            }
        }
    }

    Ok(registry
        .records()
        .map(|r| {
            let (level, supporting_reports) = tally.get(&r.code).copied().unwrap_or((WarningLevel::None, 0));
            WarningStatus {
                region: r.code.clone(),
                name: r.name.clone(),
                region_level: r.level,
                level,
                supporting_reports,
                window_from: from,
                window_to: as_of,
            }
        })
        .collect())
}
