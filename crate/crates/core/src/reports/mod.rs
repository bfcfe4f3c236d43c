//! The consultation log and per-region warning levels.
//!
//! The log is UTF-8 text with one JSON document per line; the first line is
//! a schema header (`{"schema":"flockwatch/consultation-log","version":1}`).

mod duration;
mod store;
mod warnings;

pub use duration::{format_iso_duration, parse_iso_duration};
pub use store::{ConsultationReport, NewReport, ReportFilter, ReportStore, LOG_SCHEMA, LOG_VERSION};
pub use warnings::{warning_levels, AlertPolicy, WarningLevel, WarningStatus};

use crate::geo::{RegionCode, RegionLevel};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("region `{0}` is not in the registry")]
    UnknownRegion(RegionCode),
    #[error("reports must name a district or village, `{region}` is a {level}")]
    RegionTooCoarse { region: RegionCode, level: RegionLevel },
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("warning window must be positive")]
    InvalidWindow,
    #[error("invalid alert policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid duration `{text}`: {reason}")]
    InvalidDuration { text: String, reason: String },
    #[error("report log line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("report log: {0}")]
    Io(#[from] std::io::Error),
    #[error("report encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl ReportStore {
    /// Warning levels for every registry region over the window ending at `as_of`.
    pub fn warning_levels(
        &self,
        registry: &crate::geo::Registry,
        window: chrono::Duration,
        as_of: chrono::DateTime<chrono::Utc>,
        policy: &AlertPolicy,
    ) -> Result<Vec<WarningStatus>, StoreError> {
        warning_levels(&self.snapshot(), registry, window, as_of, policy)
    }
}

#[cfg(test)]
mod tests {
    use chrono::{DateTime, Duration, TimeZone, Utc};

    use super::*;
    use crate::geo::{sample_registry, RegionCode};
    use crate::knowledge::{default_rules, diagnose};

    const ALL: [&str; 5] = [
        "depression",
        "comb_wattle_bluish_face",
        "swollen_face",
        "narrow_eyes",
        "balance_disorder",
    ];
    const VILLAGE: &str = "18.01.03.2001";

    fn at(day: u32, hour: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2026, 3, day, hour, 0, 0).unwrap()
    }

    fn report(region: &str, symptoms: &[&str], ts: DateTime<Utc>) -> NewReport {
        NewReport {
            timestamp: ts,
            region: RegionCode::parse(region).unwrap(),
            diagnosis: diagnose(&default_rules(), symptoms).unwrap(),
        }
    }

    fn level_of(statuses: &[WarningStatus], code: &str) -> WarningLevel {
        statuses.iter().find(|s| s.region.as_str() == code).unwrap().level
    }

    #[test]
    fn append_and_fetch() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        let id = store.append(report(VILLAGE, &ALL, at(1, 9)), &registry).unwrap();
        let stored = store.get(id).unwrap();
        assert_eq!(stored.top_focal, vec!["AI"]);
        assert!((stored.top_mass - 0.587275693312).abs() < 1e-9);
        assert_eq!(stored.region.as_str(), VILLAGE);
    }

    #[test]
    fn unknown_or_coarse_regions_are_rejected() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        assert!(matches!(
            store.append(report("18.01.03.2999", &ALL, at(1, 9)), &registry),
            Err(StoreError::UnknownRegion(_))
        ));
        assert!(matches!(
            store.append(report("18.01", &ALL, at(1, 9)), &registry),
            Err(StoreError::RegionTooCoarse { .. })
        ));
        assert!(store
            .append(report("18.01.07", &ALL, at(1, 9)), &registry)
            .is_ok());
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn ids_are_monotone_and_listing_keeps_order() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        let a = store.append(report(VILLAGE, &ALL, at(1, 9)), &registry).unwrap();
        let b = store
            .append(report(VILLAGE, &["narrow_eyes"], at(1, 9)), &registry)
            .unwrap();
        assert!(b > a);
        let ids: Vec<_> = store.snapshot().iter().map(|r| r.id).collect();
        assert_eq!(ids, vec![a, b]);
        // equal timestamps fall back to newest id first
        let listed: Vec<_> = store
            .query(&ReportFilter::default())
            .unwrap()
            .iter()
            .map(|r| r.id)
            .collect();
        assert_eq!(listed, vec![b, a]);
    }

    #[test]
    fn query_filters() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        assert!(store.query(&ReportFilter::default()).unwrap().is_empty());

        store.append(report(VILLAGE, &ALL, at(1, 9)), &registry).unwrap();
        store
            .append(report("18.01.07", &["narrow_eyes"], at(2, 9)), &registry)
            .unwrap();
        store
            .append(report("18.01.03.2002", &ALL, at(3, 9)), &registry)
            .unwrap();

        let all = store.query(&ReportFilter::default()).unwrap();
        let days: Vec<_> = all.iter().map(|r| r.timestamp).collect();
        assert_eq!(days, vec![at(3, 9), at(2, 9), at(1, 9)]);

        let by_prefix = store
            .query(&ReportFilter {
                region: Some(RegionCode::parse("18.01").unwrap()),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(by_prefix.len(), 3);

        let district = store
            .query(&ReportFilter {
                region: Some(RegionCode::parse("18.01.03").unwrap()),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(district.len(), 2);

        let ai = store
            .query(&ReportFilter {
                disease: Some("AI".into()),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(ai.len(), 2);
        assert!(ai.iter().all(|r| r.top_focal == ["AI"]));

        let ranged = store
            .query(&ReportFilter {
                from: Some(at(2, 0)),
                to: Some(at(2, 23)),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(ranged.len(), 1);

        assert!(matches!(
            store.query(&ReportFilter {
                from: Some(at(3, 0)),
                to: Some(at(2, 0)),
                ..Default::default()
            }),
            Err(StoreError::InvalidFilter(_))
        ));
    }

    #[test]
    fn five_symptom_report_raises_warning_up_the_chain() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        store.append(report(VILLAGE, &ALL, at(5, 9)), &registry).unwrap();
        let levels = store
            .warning_levels(&registry, Duration::days(7), at(6, 0), &AlertPolicy::default())
            .unwrap();
        assert_eq!(levels.len(), 7);
        for code in [VILLAGE, "18.01.03", "18.01", "18"] {
            assert_eq!(level_of(&levels, code), WarningLevel::Warning, "{code}");
        }
        for code in ["18.01.03.2002", "18.01.07", "18.02"] {
            assert_eq!(level_of(&levels, code), WarningLevel::None, "{code}");
        }
        let province = levels.iter().find(|s| s.region.as_str() == "18").unwrap();
        assert_eq!(province.supporting_reports, 1);
        assert_eq!(province.window_to, at(6, 0));
        assert_eq!(province.window_from, at(6, 0) - Duration::days(7));
    }

    #[test]
    fn reports_outside_the_window_do_not_count() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        store.append(report(VILLAGE, &ALL, at(1, 0)), &registry).unwrap();
        // exactly at the lower bound: excluded
        let levels = store
            .warning_levels(&registry, Duration::days(7), at(8, 0), &AlertPolicy::default())
            .unwrap();
        assert!(levels.iter().all(|s| s.level == WarningLevel::None));
        // in the future relative to as_of: excluded
        let levels = store
            .warning_levels(
                &registry,
                Duration::days(7),
                at(1, 0) - Duration::hours(1),
                &AlertPolicy::default(),
            )
            .unwrap();
        assert!(levels.iter().all(|s| s.level == WarningLevel::None));
    }

    #[test]
    fn weak_ai_report_is_a_watch() {
        // {AI} and {SHS} tie at 9/19 < 0.5
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        let id = store
            .append(
                report(VILLAGE, &["comb_wattle_bluish_face", "narrow_eyes"], at(5, 9)),
                &registry,
            )
            .unwrap();
        let stored = store.get(id).unwrap();
        assert_eq!(stored.top_focal, vec!["AI"]);
        assert!(stored.top_mass < 0.5);
        let levels = store
            .warning_levels(&registry, Duration::days(7), at(6, 0), &AlertPolicy::default())
            .unwrap();
        for code in [VILLAGE, "18.01.03", "18.01", "18"] {
            assert_eq!(level_of(&levels, code), WarningLevel::Watch, "{code}");
        }
    }

    #[test]
    fn warning_outranks_watch_and_counts_its_own_reports() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        store
            .append(
                report(
                    "18.01.03.2002",
                    &["comb_wattle_bluish_face", "narrow_eyes"],
                    at(5, 9),
                ),
                &registry,
            )
            .unwrap();
        store.append(report(VILLAGE, &ALL, at(5, 10)), &registry).unwrap();
        store
            .append(report("18.01.07", &["narrow_eyes"], at(5, 11)), &registry)
            .unwrap();
        let levels = store
            .warning_levels(&registry, Duration::days(1), at(6, 0), &AlertPolicy::default())
            .unwrap();
        assert_eq!(level_of(&levels, "18.01.03.2002"), WarningLevel::Watch);
        assert_eq!(level_of(&levels, "18.01.07"), WarningLevel::None);
        let district = levels.iter().find(|s| s.region.as_str() == "18.01.03").unwrap();
        assert_eq!(
            (district.level, district.supporting_reports),
            (WarningLevel::Warning, 1)
        );
    }

    #[test]
    fn non_positive_window_is_rejected() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        for w in [Duration::zero(), Duration::hours(-1)] {
            assert!(matches!(
                store.warning_levels(&registry, w, at(1, 0), &AlertPolicy::default()),
                Err(StoreError::InvalidWindow)
            ));
        }
    }

    #[test]
    fn stricter_policy_downgrades() {
        let registry = sample_registry();
        let store = ReportStore::in_memory();
        store.append(report(VILLAGE, &ALL, at(5, 9)), &registry).unwrap();
        let strict = AlertPolicy {
            warning_mass: 0.6,
            ..Default::default()
        };
        let levels = store
            .warning_levels(&registry, Duration::days(7), at(6, 0), &strict)
            .unwrap();
        assert_eq!(level_of(&levels, VILLAGE), WarningLevel::Watch);
        assert!(AlertPolicy {
            warning_mass: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AlertPolicy::default().validate().is_ok());
    }

    #[test]
    fn log_survives_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reports.ndjson");
        let registry = sample_registry();
        {
            let store = ReportStore::open(&path).unwrap();
            store.append(report(VILLAGE, &ALL, at(1, 9)), &registry).unwrap();
            store
                .append(report(VILLAGE, &["narrow_eyes"], at(2, 9)), &registry)
                .unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            r#"{"schema":"flockwatch/consultation-log","version":1}"#
        );

        let store = ReportStore::open(&path).unwrap();
        assert_eq!(store.len(), 2);
        let next = store.append(report(VILLAGE, &ALL, at(3, 9)), &registry).unwrap();
        assert_eq!(next, 3);
    }

    #[test]
    fn corrupt_logs_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ndjson");
        std::fs::write(&path, "{\"schema\":\"other\",\"version\":1}\n").unwrap();
        assert!(matches!(
            ReportStore::open(&path),
            Err(StoreError::Corrupt { line: 1, .. })
        ));
        std::fs::write(
            &path,
            "{\"schema\":\"flockwatch/consultation-log\",\"version\":1}\nnot json\n",
        )
        .unwrap();
        assert!(matches!(
            ReportStore::open(&path),
            Err(StoreError::Corrupt { line: 2, .. })
        ));
    }

    #[test]
    fn warning_level_parsing() {
        assert_eq!("Warning".parse::<WarningLevel>().unwrap(), WarningLevel::Warning);
        assert_eq!("none".parse::<WarningLevel>().unwrap(), WarningLevel::None);
        assert!("red".parse::<WarningLevel>().is_err());
        assert!(WarningLevel::Warning > WarningLevel::Watch);
    }
}
