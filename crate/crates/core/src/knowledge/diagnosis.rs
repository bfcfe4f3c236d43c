use serde::{Deserialize, Serialize};

use super::RuleSet;
use crate::evidence::{combine_all, EvidenceError, MassFunction};

#[derive(Debug, thiserror::Error)]
pub enum DiagnoseError {
    #[error("no symptoms selected")]
    EmptySelection,
    #[error("unknown symptom `{0}`")]
    UnknownSymptom(String),
    #[error("symptom `{symptom_id}` contradicts the evidence so far (step {step}, K = {conflict})")]
    TotalConflict {
        step: usize,
        symptom_id: String,
        conflict: f64,
    },
    #[error(transparent)]
    Evidence(EvidenceError),
}

/// Fused evidence for a symptom selection, before presentation.
#[derive(Debug, Clone)]
pub struct Fusion {
    pub mass: MassFunction,
    pub conflict_trace: Vec<f64>,
    /// Selected symptoms in combination (rule declaration) order.
    pub symptom_ids: Vec<String>,
}

/// Resolves `symptom_ids` against `rules` and combines their simple support
/// functions in rule declaration order. Repeated ids count once.
pub fn fuse<S: AsRef<str>>(rules: &RuleSet, symptom_ids: &[S]) -> Result<Fusion, DiagnoseError> {
    if symptom_ids.is_empty() {
        return Err(DiagnoseError::EmptySelection);
    }
    let mut indices: Vec<usize> = Vec::with_capacity(symptom_ids.len());
    for id in symptom_ids {
        let id = id.as_ref().trim();
        let idx = rules
            .rule_index(id)
            .ok_or_else(|| DiagnoseError::UnknownSymptom(id.to_string()))?;
        indices.push(idx);
    }
    indices.sort_unstable();
    indices.dedup();

    let selected: Vec<_> = indices.iter().map(|&i| &rules.rules()[i]).collect();
    let masses: Vec<MassFunction> = selected.iter().map(|r| r.mass_function()).collect();
    let (mass, conflict_trace) = combine_all(&masses).map_err(|e| match e {
        EvidenceError::StepFailed { step, source } => match *source {
            EvidenceError::TotalConflict { conflict } => DiagnoseError::TotalConflict {
                step,
                symptom_id: selected[step].symptom_id.clone(),
                conflict,
            },
            other => DiagnoseError::Evidence(other),
        },
        other => DiagnoseError::Evidence(other),
    })?;

    Ok(Fusion {
        mass,
        conflict_trace,
        symptom_ids: selected.iter().map(|r| r.symptom_id.clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFocal {
    pub focal: Vec<String>,
    /// `Θ` for the whole frame, otherwise `{A, B}`.
    pub display: String,
    pub is_frame: bool,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseSupport {
    pub disease: String,
    pub label: String,
    pub belief: f64,
    pub plausibility: f64,
}

/// Outcome of a consultation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub rules_version: String,
    pub symptom_ids: Vec<String>,
    pub ranked: Vec<RankedFocal>,
    pub top: Vec<String>,
    pub top_label: String,
    pub top_mass: f64,
    pub per_disease: Vec<DiseaseSupport>,
    pub conflict_trace: Vec<f64>,
}

impl Diagnosis {
    /// Diseases whose plausibility equals the maximum (within 1e-12).
    pub fn plausibility_leaders(&self) -> Vec<&str> {
        plausibility_leaders(&self.per_disease)
    }
}

pub fn plausibility_leaders(support: &[DiseaseSupport]) -> Vec<&str> {
    let max = support
        .iter()
        .map(|d| d.plausibility)
        .fold(f64::NEG_INFINITY, f64::max);
    support
        .iter()
        .filter(|d| max - d.plausibility <= 1e-12)
        .map(|d| d.disease.as_str())
        .collect()
}

/// Runs a consultation: fuses the selected symptoms, ranks the focal sets
/// and reports belief and plausibility for every disease singleton.
pub fn diagnose<S: AsRef<str>>(rules: &RuleSet, symptom_ids: &[S]) -> Result<Diagnosis, DiagnoseError> {
    let fusion = fuse(rules, symptom_ids)?;
    Ok(present(rules, fusion))
}

fn present(rules: &RuleSet, fusion: Fusion) -> Diagnosis {
    let frame = rules.frame();
    let ranked: Vec<RankedFocal> = fusion
        .mass
        .rank()
        .into_iter()
        .map(|(set, mass)| RankedFocal {
            focal: set.labels().into_iter().map(str::to_string).collect(),
            display: set.to_string(),
            is_frame: set.is_theta(),
            mass,
        })
        .collect();

    let per_disease = rules
        .diseases()
        .iter()
        .map(|d| {
            let idx = frame.index_of(&d.id).expect("disease ids form the frame");
            let single = frame.singleton(idx).expect("index from frame");
            DiseaseSupport {
                disease: d.id.clone(),
                label: d.label.clone(),
                belief: fusion.mass.belief(&single).expect("same frame"),
                plausibility: fusion.mass.plausibility(&single).expect("same frame"),
            }
        })
        .collect();

    let head = ranked.first().expect("a valid mass function has a focal set");
    let top_label = match head.focal.as_slice() {
        [only] => rules.display_name(only).to_string(),
        _ => head.display.clone(),
    };

    Diagnosis {
        rules_version: rules.version().to_string(),
        symptom_ids: fusion.symptom_ids,
        top: head.focal.clone(),
        top_mass: head.mass,
        top_label,
        ranked,
        per_disease,
        conflict_trace: fusion.conflict_trace,
    }
}
