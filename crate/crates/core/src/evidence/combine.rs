use std::collections::BTreeMap;

use super::{EvidenceError, MassFunction};

/// Conflict at or above this value is treated as total contradiction.
pub const TOTAL_CONFLICT_THRESHOLD: f64 = 1.0 - 1e-12;

/// Result of one application of Dempster's rule.
#[derive(Debug, Clone)]
pub struct CombinationOutcome {
    pub result: MassFunction,
    /// Mass that fell on empty intersections before renormalization.
    pub conflict: f64,
}

/// Dempster's rule of combination.
///
/// Products of every focal pair accumulate on the intersection of the two
/// sets; products on the empty set form the conflict `K`, and what remains
/// is rescaled by `1 / (1 - K)`.
pub fn combine(m1: &MassFunction, m2: &MassFunction) -> Result<CombinationOutcome, EvidenceError> {
    m1.frame().ensure_same(m2.frame())?;

    let mut joint: BTreeMap<u32, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (&b, &mb) in m1.raw() {
        for (&c, &mc) in m2.raw() {
            let product = mb * mc;
            match b & c {
                0 => conflict += product,
                a => *joint.entry(a).or_insert(0.0) += product,
            }
        }
    }

    if conflict >= TOTAL_CONFLICT_THRESHOLD {
        return Err(EvidenceError::TotalConflict { conflict });
    }

    // surviving mass equals 1 - K up to rounding
    let agreement: f64 = joint.values().sum();
    if agreement <= 0.0 {
        return Err(EvidenceError::TotalConflict { conflict });
    }
    for m in joint.values_mut() {
        *m /= agreement;
    }

    let result = MassFunction::from_raw(m1.frame().clone(), joint)?;
    Ok(CombinationOutcome { result, conflict })
}

/// Left fold of [`combine`] over `masses`, returning the fused mass and the
/// conflict of each step in order.
pub fn combine_all(masses: &[MassFunction]) -> Result<(MassFunction, Vec<f64>), EvidenceError> {
    let (first, rest) = masses.split_first().ok_or(EvidenceError::NothingToCombine)?;
    let mut acc = first.clone();
    let mut trace = Vec::with_capacity(rest.len());
    for (i, next) in rest.iter().enumerate() {
        let outcome = combine(&acc, next).map_err(|source| EvidenceError::StepFailed {
            step: i + 1,
            source: Box::new(source),
        })?;
        trace.push(outcome.conflict);
        acc = outcome.result;
    }
    Ok((acc, trace))
}
