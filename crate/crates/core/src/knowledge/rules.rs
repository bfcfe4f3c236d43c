use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::evidence::{Frame, HypothesisSet, MassFunction, OTHER_LABEL};

/// The rule file shipped with the repository.
pub const DEFAULT_RULES_JSON: &str = include_str!("../../../../rules/avian_default.json");

#[derive(Debug, thiserror::Error)]
pub enum RuleError {
    #[error("malformed rule file at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("failed to read rule file: {0}")]
    Io(#[from] std::io::Error),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

impl RuleError {
    fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        RuleError::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// On-disk shape of a rule file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default = "default_true")]
    pub include_other: bool,
    pub diseases: Vec<DiseaseEntry>,
    pub symptoms: Vec<SymptomEntry>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiseaseEntry {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymptomEntry {
    pub id: String,
    pub label: String,
    pub focal: Vec<String>,
    pub bpa: f64,
}

/// One piece of symptom evidence: observing the symptom commits `bpa` to
/// the focal diseases and leaves the rest on Θ.
#[derive(Debug, Clone)]
pub struct SymptomRule {
    pub symptom_id: String,
    pub label: String,
    pub focal_labels: Vec<String>,
    pub bpa: f64,
    focal: HypothesisSet,
}

impl SymptomRule {
    pub fn focal(&self) -> &HypothesisSet {
        &self.focal
    }

    pub fn mass_function(&self) -> MassFunction {
        MassFunction::simple_support(&self.focal, self.bpa).expect("rule bpa and focal set validated at load")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disease {
    pub id: String,
    pub label: String,
}

/// A validated, immutable knowledge base.
#[derive(Debug, Clone)]
pub struct RuleSet {
    frame: Frame,
    version: String,
    diseases: Vec<Disease>,
    rules: Vec<SymptomRule>,
}

impl RuleSet {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn diseases(&self) -> &[Disease] {
        &self.diseases
    }

    pub fn rules(&self) -> &[SymptomRule] {
        &self.rules
    }

    pub fn rule(&self, symptom_id: &str) -> Option<&SymptomRule> {
        self.rules.iter().find(|r| r.symptom_id == symptom_id)
    }

    pub fn rule_index(&self, symptom_id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.symptom_id == symptom_id)
    }

    pub fn disease(&self, id: &str) -> Option<&Disease> {
        self.diseases.iter().find(|d| d.id == id)
    }

    /// Display name for a frame label, falling back to the label itself.
    pub fn display_name<'a>(&'a self, label: &'a str) -> &'a str {
        self.disease(label).map_or(label, |d| d.label.as_str())
    }

    pub fn from_file(file: RuleFile) -> Result<Self, RuleError> {
        let mut diseases: Vec<Disease> = Vec::with_capacity(file.diseases.len());
        for (i, d) in file.diseases.iter().enumerate() {
            let id = d.id.trim();
            let location = format!("/diseases/{i}");
            if id.is_empty() {
                return Err(RuleError::invalid(location, "disease id must not be blank"));
            }
            if id == OTHER_LABEL {
                return Err(RuleError::invalid(
                    location,
                    format!("disease id `{OTHER_LABEL}` is reserved"),
                ));
            }
            if diseases.iter().any(|x| x.id == id) {
                return Err(RuleError::invalid(
                    location,
                    format!("duplicate disease id `{id}`"),
                ));
            }
            diseases.push(Disease {
                id: id.to_string(),
                label: d.label.trim().to_string(),
            });
        }

        let frame = Frame::new(diseases.iter().map(|d| d.id.as_str()), file.include_other)
            .map_err(|e| RuleError::invalid("/diseases", e.to_string()))?;

        let mut rules: Vec<SymptomRule> = Vec::with_capacity(file.symptoms.len());
        for (i, s) in file.symptoms.iter().enumerate() {
            let id = s.id.trim();
            let location = if id.is_empty() {
                format!("/symptoms/{i}")
            } else {
                format!("/symptoms/{i} (`{id}`)")
            };
            if id.is_empty() {
                return Err(RuleError::invalid(location, "symptom id must not be blank"));
            }
            if rules.iter().any(|r| r.symptom_id == id) {
                return Err(RuleError::invalid(
                    location,
                    format!("duplicate symptom id `{id}`"),
                ));
            }
            if !s.bpa.is_finite() || s.bpa <= 0.0 || s.bpa >= 1.0 {
                return Err(RuleError::invalid(
                    location,
                    format!("bpa {} outside the open interval (0, 1)", s.bpa),
                ));
            }
            if s.focal.is_empty() {
                return Err(RuleError::invalid(location, "focal disease list is empty"));
            }
            let mut focal_labels: Vec<String> = Vec::with_capacity(s.focal.len());
            for f in &s.focal {
                let f = f.trim();
                if !diseases.iter().any(|d| d.id == f) {
                    return Err(RuleError::invalid(
                        location,
                        format!("unknown disease `{f}` in focal set"),
                    ));
                }
                if !focal_labels.iter().any(|x| x == f) {
                    focal_labels.push(f.to_string());
                }
            }
            let focal = frame
                .set_of(&focal_labels)
                .map_err(|e| RuleError::invalid(&location, e.to_string()))?;
            // keep labels in frame order
            let focal_labels = focal.labels().into_iter().map(str::to_string).collect();
            rules.push(SymptomRule {
                symptom_id: id.to_string(),
                label: s.label.trim().to_string(),
                focal_labels,
                bpa: s.bpa,
                focal,
            });
        }

        Ok(RuleSet {
            frame,
            version: file.version,
            diseases,
            rules,
        })
    }

    pub fn to_file(&self) -> RuleFile {
        RuleFile {
            version: self.version.clone(),
            description: None,
            include_other: self.frame.includes_other(),
            diseases: self
                .diseases
                .iter()
                .map(|d| DiseaseEntry {
                    id: d.id.clone(),
                    label: d.label.clone(),
                })
                .collect(),
            symptoms: self
                .rules
                .iter()
                .map(|r| SymptomEntry {
                    id: r.symptom_id.clone(),
                    label: r.label.clone(),
                    focal: r.focal_labels.clone(),
                    bpa: r.bpa,
                })
                .collect(),
        }
    }
}

/// Parses and validates a rule file.
pub fn load_rules<R: Read>(mut source: R) -> Result<RuleSet, RuleError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_rules(&text)
}

pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let file: RuleFile = serde_json::from_str(text).map_err(|e| RuleError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    RuleSet::from_file(file)
}

/// The shipped five-symptom knowledge base.
pub fn default_rules() -> RuleSet {
    parse_rules(DEFAULT_RULES_JSON).expect("shipped rule file is valid")
}
