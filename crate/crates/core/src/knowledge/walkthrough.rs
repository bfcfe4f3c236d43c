//! Step-by-step replay of the five-symptom reference consultation, compared
//! against the published four- and five-decimal tables.

use serde::Serialize;

use super::{fuse, DiagnoseError, RuleSet};

/// Published values are rounded to five decimals.
pub const REFERENCE_TOLERANCE: f64 = 5e-5;

/// Symptom ids in the order the reference consultation adds them.
pub const REFERENCE_SYMPTOMS: [&str; 5] = [
    "depression",
    "comb_wattle_bluish_face",
    "swollen_face",
    "narrow_eyes",
    "balance_disorder",
];

const S6: &[&str] = &["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"];

#[derive(Debug, Clone, Copy)]
pub struct ReferenceEntry {
    /// `None` stands for Θ.
    pub focal: Option<&'static [&'static str]>,
    pub published: f64,
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReferenceStep {
    pub name: &'static str,
    /// Number of leading [`REFERENCE_SYMPTOMS`] combined.
    pub symptoms: usize,
    pub conflict: f64,
    pub entries: &'static [ReferenceEntry],
}

const fn entry(focal: &'static [&'static str], published: f64) -> ReferenceEntry {
    ReferenceEntry {
        focal: Some(focal),
        published,
        note: None,
    }
}

const fn theta(published: f64) -> ReferenceEntry {
    ReferenceEntry {
        focal: None,
        published,
        note: None,
    }
}

pub const REFERENCE_STEPS: [ReferenceStep; 4] = [
    ReferenceStep {
        name: "m3",
        symptoms: 2,
        conflict: 0.0,
        entries: &[entry(&["AI"], 0.9), entry(S6, 0.07), theta(0.03)],
    },
    ReferenceStep {
        name: "m5",
        symptoms: 3,
        conflict: 0.0,
        entries: &[
            entry(&["AI"], 0.9),
            entry(&["AI", "ND", "FC"], 0.083),
            entry(S6, 0.0119),
            theta(0.0051),
        ],
    },
    ReferenceStep {
        name: "m7",
        symptoms: 4,
        conflict: 0.8847,
        entries: &[
            entry(&["SHS"], 0.13270),
            entry(&["AI"], 0.78057),
            entry(&["AI", "ND", "FC"], 0.07199),
            entry(S6, 0.01032),
            theta(0.00442),
        ],
    },
    ReferenceStep {
        name: "m9",
        symptoms: 5,
        conflict: 0.46834,
        entries: &[
            entry(&["SHS"], 0.24960),
            entry(&["AI"], 0.58725),
            entry(&["ND"], 0.08124),
            entry(&["ND", "SHS"], 0.01663),
            entry(&["AI", "ND", "FC"], 0.05417),
            entry(S6, 0.00777),
            ReferenceEntry {
                focal: None,
                published: 0.00333,
                note: Some("printed quotient 0.000232/(1 - 0.061038) contradicts its own cells; reference is 0.00177/0.53166"),
            },
        ],
    },
];

#[derive(Debug, Clone, Serialize)]
pub struct RowReport {
    pub focal: String,
    pub published: f64,
    pub computed: f64,
    pub delta: f64,
    pub within_tolerance: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub name: &'static str,
    pub symptoms: Vec<String>,
    pub published_conflict: f64,
    pub computed_conflict: f64,
    pub rows: Vec<RowReport>,
    /// Focal sets the replay produced that the table does not list.
    pub unlisted_mass: f64,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        (self.computed_conflict - self.published_conflict).abs() <= REFERENCE_TOLERANCE
            && self.unlisted_mass <= REFERENCE_TOLERANCE
            && self.rows.iter().all(|r| r.within_tolerance)
    }
}

/// Replays every reference step with `rules`.
pub fn replay(rules: &RuleSet) -> Result<Vec<StepReport>, DiagnoseError> {
    let frame = rules.frame();
    REFERENCE_STEPS
        .iter()
        .map(|step| {
            let ids = &REFERENCE_SYMPTOMS[..step.symptoms];
            let fusion = fuse(rules, ids)?;
            let mut rows = Vec::with_capacity(step.entries.len());
            let mut covered = Vec::with_capacity(step.entries.len());
            for e in step.entries {
                let set = match e.focal {
                    Some(labels) => frame.set_of(labels),
                    None => Ok(frame.theta()),
                }
                .map_err(DiagnoseError::Evidence)?;
                covered.push(set.bits());
                let computed = fusion.mass.mass(&set).map_err(DiagnoseError::Evidence)?;
                let delta = computed - e.published;
                rows.push(RowReport {
                    focal: set.to_string(),
                    published: e.published,
                    computed,
                    delta,
                    within_tolerance: delta.abs() <= REFERENCE_TOLERANCE,
                    note: e.note,
                });
            }
            let unlisted_mass = fusion
                .mass
                .focal_elements()
                .filter(|(s, _)| !covered.contains(&s.bits()))
                .fold(0.0, |acc, (_, m)| acc + m);
            let computed_conflict = fusion.conflict_trace.last().copied().unwrap_or(0.0);
            Ok(StepReport {
                name: step.name,
                symptoms: fusion.symptom_ids,
                published_conflict: step.conflict,
                computed_conflict,
                rows,
                unlisted_mass,
            })
        })
        .collect()
}
