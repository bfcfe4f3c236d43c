//! Evidential early warning for poultry disease.
//!
//! - [`evidence`]: Dempster-Shafer mass functions and combination.
//! - [`knowledge`]: symptom rules and the diagnosis pipeline.
//! - [`geo`]: the administrative region registry and its geometry.
//! - [`reports`]: the consultation log and warning-level aggregation.

pub mod evidence;
pub mod geo;
pub mod knowledge;
pub mod reports;
