use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{EvidenceError, Frame, HypothesisSet};

/// Tolerance on the total mass of a valid mass function.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Masses below this are dropped as zero.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// A basic probability assignment over the subsets of a frame.
///
/// The empty set never carries mass, every stored mass lies in
/// `(PRUNE_THRESHOLD, 1]`, and the masses sum to one within
/// [`NORMALIZATION_TOLERANCE`].
#[derive(Clone, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    focal: BTreeMap<u32, f64>,
}

impl MassFunction {
    /// Builds a mass function from `(set, mass)` pairs. Repeated sets
    /// accumulate; zero-mass entries are dropped.
    pub fn new<I>(frame: &Frame, entries: I) -> Result<Self, EvidenceError>
    where
        I: IntoIterator<Item = (HypothesisSet, f64)>,
    {
        let mut focal: BTreeMap<u32, f64> = BTreeMap::new();
        for (set, mass) in entries {
            frame.ensure_same(set.frame())?;
            if !mass.is_finite() || !(0.0..=1.0).contains(&mass) {
                return Err(EvidenceError::InvalidMass {
                    set: set.to_string(),
                    mass,
                });
            }
            if mass == 0.0 {
                continue;
            }
            if set.is_empty() {
                return Err(EvidenceError::MassOnEmptySet);
            }
            *focal.entry(set.bits()).or_insert(0.0) += mass;
        }
        Self::from_raw(frame.clone(), focal)
    }

    /// Total ignorance: all mass on Θ.
    pub fn vacuous(frame: &Frame) -> Self {
        MassFunction {
            frame: frame.clone(),
            focal: BTreeMap::from([(frame.full_bits(), 1.0)]),
        }
    }

    /// A simple support function: `bpa` on `focal`, the remainder on Θ.
    pub fn simple_support(focal: &HypothesisSet, bpa: f64) -> Result<Self, EvidenceError> {
        if !bpa.is_finite() || bpa <= 0.0 || bpa > 1.0 {
            return Err(EvidenceError::InvalidBpa(bpa));
        }
        if focal.is_empty() {
            return Err(EvidenceError::EmptyFocalSet);
        }
        let frame = focal.frame().clone();
        let mut map = BTreeMap::new();
        map.insert(focal.bits(), bpa);
        let rest = 1.0 - bpa;
        if rest > PRUNE_THRESHOLD {
            *map.entry(frame.full_bits()).or_insert(0.0) += rest;
        }
        Ok(MassFunction { frame, focal: map })
    }

    /// Validates and prunes a bitmask-keyed map.
    pub(crate) fn from_raw(frame: Frame, mut focal: BTreeMap<u32, f64>) -> Result<Self, EvidenceError> {
        focal.retain(|_, m| *m >= PRUNE_THRESHOLD);
        if focal.contains_key(&0) {
            return Err(EvidenceError::MassOnEmptySet);
        }
        let full = frame.full_bits();
        if let Some((&bits, _)) = focal.iter().find(|(&b, _)| b & !full != 0) {
            return Err(EvidenceError::BitsOutsideFrame { bits });
        }
        let total: f64 = focal.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(EvidenceError::NotNormalized { total });
        }
        if let Some((&bits, &mass)) = focal.iter().find(|(_, &m)| m > 1.0 + NORMALIZATION_TOLERANCE) {
            return Err(EvidenceError::InvalidMass {
                set: frame.set_from_bits(bits)?.to_string(),
                mass,
            });
        }
        Ok(MassFunction { frame, focal })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// m(A); zero for non-focal sets.
    pub fn mass(&self, set: &HypothesisSet) -> Result<f64, EvidenceError> {
        self.frame.ensure_same(set.frame())?;
        Ok(self.mass_of_bits(set.bits()))
    }

    pub fn mass_of_bits(&self, bits: u32) -> f64 {
        self.focal.get(&bits).copied().unwrap_or(0.0)
    }

    /// Focal elements in ascending bitmask order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (HypothesisSet, f64)> + '_ {
        self.focal.iter().map(|(&bits, &m)| {
            (
                self.frame
                    .set_from_bits(bits)
                    .expect("focal bits validated at construction"),
                m,
            )
        })
    }

    pub(crate) fn raw(&self) -> &BTreeMap<u32, f64> {
        &self.focal
    }

    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    pub fn total(&self) -> f64 {
        self.focal.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal.contains_key(&self.frame.full_bits())
    }

    /// Bel(A): total mass of focal sets contained in `a`.
    pub fn belief(&self, a: &HypothesisSet) -> Result<f64, EvidenceError> {
        self.frame.ensure_same(a.frame())?;
        let a = a.bits();
        Ok(self
            .focal
            .iter()
            .filter(|(&b, _)| b & !a == 0)
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// Pl(A): total mass of focal sets intersecting `a`.
    pub fn plausibility(&self, a: &HypothesisSet) -> Result<f64, EvidenceError> {
        self.frame.ensure_same(a.frame())?;
        let a = a.bits();
        Ok(self
            .focal
            .iter()
            .filter(|(&b, _)| b & a != 0)
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// Focal sets by descending mass. Ties go to the smaller set, then to
    /// the set whose members come first in frame order.
    pub fn rank(&self) -> Vec<(HypothesisSet, f64)> {
        let mut entries: Vec<(u32, f64)> = self.focal.iter().map(|(&b, &m)| (b, m)).collect();
        entries.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| a.0.count_ones().cmp(&b.0.count_ones()))
                .then_with(|| frame_order(a.0, b.0))
        });
        entries
            .into_iter()
            .map(|(bits, m)| {
                (
                    self.frame
                        .set_from_bits(bits)
                        .expect("focal bits validated at construction"),
                    m,
                )
            })
            .collect()
    }
}

/// Lexicographic comparison of ascending member indices.
fn frame_order(a: u32, b: u32) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a, b) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia.cmp(&ib);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

impl std::fmt::Debug for MassFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut map = f.debug_map();
        for (set, m) in self.focal_elements() {
            map.entry(&set.to_string(), &m);
        }
        map.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn poultry() -> Frame {
        Frame::new(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"], true).unwrap()
    }

    #[test]
    fn unsupported_sets_have_positive_zero_belief() {
        let frame = poultry();
        let m = MassFunction::simple_support(&frame.set_of(["AI"]).unwrap(), 0.9).unwrap();
        let fc = frame.set_of(["FC"]).unwrap();
        assert!(m.belief(&fc).unwrap().is_sign_positive());
        assert!(m.plausibility(&frame.empty_set()).unwrap().is_sign_positive());
    }

    #[test]
    fn simple_support_splits_with_theta() {
        let frame = poultry();
        let s6 = frame
            .set_of(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"])
            .unwrap();
        let m1 = MassFunction::simple_support(&s6, 0.7).unwrap();
        assert_abs_diff_eq!(m1.mass(&s6).unwrap(), 0.7);
        assert_abs_diff_eq!(m1.mass(&frame.theta()).unwrap(), 0.3, epsilon = 1e-15);

        let ai = frame.set_of(["AI"]).unwrap();
        let m2 = MassFunction::simple_support(&ai, 0.9).unwrap();
        assert_abs_diff_eq!(m2.mass(&frame.theta()).unwrap(), 0.1, epsilon = 1e-15);

        let certain = MassFunction::simple_support(&ai, 1.0).unwrap();
        assert_eq!(certain.focal_count(), 1);
        assert_eq!(certain.mass(&frame.theta()).unwrap(), 0.0);
    }

    #[test]
    fn simple_support_on_theta_collapses() {
        let frame = poultry();
        let m = MassFunction::simple_support(&frame.theta(), 0.4).unwrap();
        assert!(m.is_vacuous());
    }

    #[test]
    fn simple_support_rejects_bad_input() {
        let frame = poultry();
        let ai = frame.set_of(["AI"]).unwrap();
        for bpa in [0.0, -0.1, 1.2, f64::NAN] {
            assert!(matches!(
                MassFunction::simple_support(&ai, bpa),
                Err(EvidenceError::InvalidBpa(_))
            ));
        }
        assert!(matches!(
            MassFunction::simple_support(&frame.empty_set(), 0.5),
            Err(EvidenceError::EmptyFocalSet)
        ));
    }

    #[test]
    fn construction_validates() {
        let frame = Frame::new(["A", "B"], false).unwrap();
        let a = frame.set_of(["A"]).unwrap();
        let b = frame.set_of(["B"]).unwrap();
        assert!(MassFunction::new(&frame, [(a.clone(), 0.5), (b.clone(), 0.5)]).is_ok());
        assert!(matches!(
            MassFunction::new(&frame, [(a.clone(), 0.5)]),
            Err(EvidenceError::NotNormalized { .. })
        ));
        assert!(matches!(
            MassFunction::new(&frame, [(frame.empty_set(), 0.5), (a.clone(), 0.5)]),
            Err(EvidenceError::MassOnEmptySet)
        ));
        assert!(matches!(
            MassFunction::new(&frame, [(a.clone(), 1.5), (b.clone(), -0.5)]),
            Err(EvidenceError::InvalidMass { .. })
        ));
        // repeated keys accumulate
        let m = MassFunction::new(&frame, [(a.clone(), 0.25), (a.clone(), 0.75)]).unwrap();
        assert_eq!(m.mass(&a).unwrap(), 1.0);
        // zero entries, including on the empty set, are simply absent
        let m = MassFunction::new(&frame, [(frame.empty_set(), 0.0), (b.clone(), 1.0)]).unwrap();
        assert_eq!(m.focal_count(), 1);
    }

    #[test]
    fn tiny_masses_are_pruned() {
        let frame = Frame::new(["A", "B"], false).unwrap();
        let mut raw = BTreeMap::new();
        raw.insert(1, 1.0 - 1e-13);
        raw.insert(2, 1e-13);
        let m = MassFunction::from_raw(frame, raw).unwrap();
        assert_eq!(m.focal_count(), 1);
    }

    #[test]
    fn belief_and_plausibility_of_theta_and_empty() {
        let frame = poultry();
        let ai = frame.set_of(["AI"]).unwrap();
        let nd = frame.set_of(["ND"]).unwrap();
        let m = MassFunction::simple_support(&ai, 0.9).unwrap();
        assert_abs_diff_eq!(m.belief(&frame.theta()).unwrap(), 1.0);
        assert_abs_diff_eq!(m.plausibility(&frame.theta()).unwrap(), 1.0);
        assert_eq!(m.belief(&frame.empty_set()).unwrap(), 0.0);
        assert_eq!(m.plausibility(&frame.empty_set()).unwrap(), 0.0);
        assert_abs_diff_eq!(m.plausibility(&nd).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(m.belief(&nd).unwrap(), 0.0);
    }

    #[test]
    fn queries_across_frames_fail() {
        let frame = poultry();
        let other = Frame::new(["AI"], false).unwrap();
        let m = MassFunction::vacuous(&frame);
        let a = other.set_of(["AI"]).unwrap();
        assert!(matches!(m.belief(&a), Err(EvidenceError::FrameMismatch)));
        assert!(matches!(m.plausibility(&a), Err(EvidenceError::FrameMismatch)));
        assert!(matches!(m.mass(&a), Err(EvidenceError::FrameMismatch)));
    }

    #[test]
    fn rank_orders_by_mass_then_size_then_frame_order() {
        let frame = Frame::new(["A", "B", "C"], false).unwrap();
        let a = frame.set_of(["A"]).unwrap();
        let b = frame.set_of(["B"]).unwrap();
        let m = MassFunction::new(&frame, [(b.clone(), 0.5), (a.clone(), 0.5)]).unwrap();
        let ranked = m.rank();
        assert_eq!(ranked[0].0, a);
        assert_eq!(ranked[1].0, b);

        let bc = frame.set_of(["B", "C"]).unwrap();
        let m = MassFunction::new(
            &frame,
            [(bc.clone(), 0.4), (b.clone(), 0.4), (frame.theta(), 0.2)],
        )
        .unwrap();
        let ranked = m.rank();
        assert_eq!(ranked[0].0, b);
        assert_eq!(ranked[1].0, bc);
        assert!(ranked[2].0.is_theta());

        let vac = MassFunction::vacuous(&frame).rank();
        assert_eq!(vac.len(), 1);
        assert!(vac[0].0.is_theta());
        assert_eq!(vac[0].1, 1.0);
    }

    #[test]
    fn frame_order_is_lexicographic_on_members() {
        assert_eq!(frame_order(0b001, 0b010), Ordering::Less);
        assert_eq!(frame_order(0b011, 0b101), Ordering::Less);
        assert_eq!(frame_order(0b110, 0b101), Ordering::Greater);
        assert_eq!(frame_order(0b110, 0b110), Ordering::Equal);
    }
}
