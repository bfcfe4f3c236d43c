//! Symptom rules and the consultation pipeline built on [`crate::evidence`].

mod diagnosis;
mod rules;
mod validate;
pub mod walkthrough;

pub use diagnosis::{
    diagnose, fuse, plausibility_leaders, DiagnoseError, Diagnosis, DiseaseSupport, Fusion, RankedFocal,
};
pub use rules::{
    default_rules, load_rules, parse_rules, Disease, DiseaseEntry, RuleError, RuleFile, RuleSet,
    SymptomEntry, SymptomRule, DEFAULT_RULES_JSON,
};
pub use validate::{validate_rules, Finding, Severity, HIGH_CONFLICT_WARNING};
