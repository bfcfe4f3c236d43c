use serde::Serialize;

use super::RuleSet;

/// Conflict between two rules at or above this raises a warning.
pub const HIGH_CONFLICT_WARNING: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub subject: String,
    pub message: String,
}

/// Lints a rule set. Findings are advisory; a loaded [`RuleSet`] is always usable.
///
/// Two rules with disjoint focal sets conflict with `K = bpa1 * bpa2` when
/// combined alone; pairs at or above [`HIGH_CONFLICT_WARNING`] are flagged.
/// Diseases that no rule mentions are reported as info.
pub fn validate_rules(rules: &RuleSet) -> Vec<Finding> {
    let mut findings = Vec::new();
    let all = rules.rules();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let inter = a.focal().bits() & b.focal().bits();
            let conflict = a.bpa * b.bpa;
            if inter == 0 && conflict >= HIGH_CONFLICT_WARNING {
                findings.push(Finding {
                    severity: Severity::Warning,
                    subject: format!("{}+{}", a.symptom_id, b.symptom_id),
                    message: format!(
                        "disjoint focal sets {} and {} conflict with K = {conflict:.4} when observed together",
                        a.focal(),
                        b.focal()
                    ),
                });
            }
        }
    }
    for d in rules.diseases() {
        if !all.iter().any(|r| r.focal_labels.iter().any(|l| l == &d.id)) {
            findings.push(Finding {
                severity: Severity::Info,
                subject: d.id.clone(),
                message: format!("disease `{}` is not referenced by any symptom", d.id),
            });
        }
    }
    findings
}
