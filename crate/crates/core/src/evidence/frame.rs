use std::fmt;
use std::sync::Arc;

use super::EvidenceError;

/// Maximum number of hypotheses in a frame, including the catch-all.
pub const MAX_FRAME_SIZE: usize = 30;

/// Label reserved for the implicit catch-all hypothesis.
pub const OTHER_LABEL: &str = "OTHER";

#[derive(Debug, PartialEq, Eq)]
struct FrameInner {
    labels: Vec<String>,
    includes_other: bool,
}

/// A frame of discernment: an ordered, fixed list of mutually exclusive
/// hypotheses. Cloning is cheap; clones share the same label storage.
#[derive(Clone)]
pub struct Frame(Arc<FrameInner>);

impl Frame {
    /// Builds a frame from `labels`, optionally appending the reserved
    /// [`OTHER_LABEL`] hypothesis. Labels are trimmed before the uniqueness check.
    pub fn new<I, S>(labels: I, include_other: bool) -> Result<Self, EvidenceError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for label in labels {
            let label = label.as_ref().trim();
            if label.is_empty() {
                return Err(EvidenceError::BlankLabel);
            }
            if out.iter().any(|l| l == label) {
                return Err(EvidenceError::DuplicateLabel(label.to_string()));
            }
            out.push(label.to_string());
        }
        if out.is_empty() {
            return Err(EvidenceError::EmptyFrame);
        }
        if include_other {
            if out.iter().any(|l| l == OTHER_LABEL) {
                return Err(EvidenceError::DuplicateLabel(OTHER_LABEL.to_string()));
            }
            out.push(OTHER_LABEL.to_string());
        }
        if out.len() > MAX_FRAME_SIZE {
            return Err(EvidenceError::TooManyLabels {
                count: out.len(),
                max: MAX_FRAME_SIZE,
            });
        }
        Ok(Frame(Arc::new(FrameInner {
            labels: out,
            includes_other: include_other,
        })))
    }

    /// All labels, including the catch-all when present.
    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn includes_other(&self) -> bool {
        self.0.includes_other
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    pub(crate) fn full_bits(&self) -> u32 {
        // len <= 30, so the shift never overflows
        (1u32 << self.len()) - 1
    }

    /// The full frame, Θ.
    pub fn theta(&self) -> HypothesisSet {
        HypothesisSet {
            frame: self.clone(),
            bits: self.full_bits(),
        }
    }

    pub fn empty_set(&self) -> HypothesisSet {
        HypothesisSet {
            frame: self.clone(),
            bits: 0,
        }
    }

    pub fn singleton(&self, index: usize) -> Result<HypothesisSet, EvidenceError> {
        if index >= self.len() {
            return Err(EvidenceError::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok(HypothesisSet {
            frame: self.clone(),
            bits: 1 << index,
        })
    }

    /// Resolves a list of labels to a subset of this frame.
    pub fn set_of<I, S>(&self, labels: I) -> Result<HypothesisSet, EvidenceError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u32;
        for label in labels {
            let label = label.as_ref().trim();
            let idx = self
                .index_of(label)
                .ok_or_else(|| EvidenceError::UnknownLabel(label.to_string()))?;
            bits |= 1 << idx;
        }
        Ok(HypothesisSet {
            frame: self.clone(),
            bits,
        })
    }

    /// Builds a set straight from a bitmask over frame index order.
    pub fn set_from_bits(&self, bits: u32) -> Result<HypothesisSet, EvidenceError> {
        if bits & !self.full_bits() != 0 {
            return Err(EvidenceError::BitsOutsideFrame { bits });
        }
        Ok(HypothesisSet {
            frame: self.clone(),
            bits,
        })
    }

    pub(crate) fn same_as(&self, other: &Frame) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    pub(crate) fn ensure_same(&self, other: &Frame) -> Result<(), EvidenceError> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(EvidenceError::FrameMismatch)
        }
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Frame").field(&self.0.labels).finish()
    }
}

/// A subset of a frame, stored as a bitmask over the frame's index order.
#[derive(Clone, PartialEq, Eq)]
pub struct HypothesisSet {
    frame: Frame,
    bits: u32,
}

impl HypothesisSet {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_theta(&self) -> bool {
        self.bits == self.frame.full_bits()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, index: usize) -> bool {
        index < 32 && self.bits & (1 << index) != 0
    }

    /// Member indices in ascending frame order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.frame.len()).filter(move |&i| self.bits & (1 << i) != 0)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.frame.labels()[i].as_str()).collect()
    }

    pub fn intersect(&self, other: &HypothesisSet) -> Result<HypothesisSet, EvidenceError> {
        self.frame.ensure_same(&other.frame)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    pub fn union(&self, other: &HypothesisSet) -> Result<HypothesisSet, EvidenceError> {
        self.frame.ensure_same(&other.frame)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    pub fn complement(&self) -> HypothesisSet {
        self.with_bits(!self.bits & self.frame.full_bits())
    }

    pub fn is_subset_of(&self, other: &HypothesisSet) -> Result<bool, EvidenceError> {
        self.frame.ensure_same(&other.frame)?;
        Ok(self.bits & !other.bits == 0)
    }

    fn with_bits(&self, bits: u32) -> HypothesisSet {
        HypothesisSet {
            frame: self.frame.clone(),
            bits,
        }
    }
}

impl fmt::Display for HypothesisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_theta() {
            return f.write_str("Θ");
        }
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

impl fmt::Debug for HypothesisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HypothesisSet({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISEASES: [&str; 6] = ["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"];

    #[test]
    fn poultry_frame_has_theta_strictly_above_six_diseases() {
        let frame = Frame::new(DISEASES, true).unwrap();
        assert_eq!(frame.len(), 7);
        assert_eq!(frame.labels().last().unwrap(), OTHER_LABEL);
        let six = frame.set_of(DISEASES).unwrap();
        let theta = frame.theta();
        assert!(six.is_subset_of(&theta).unwrap());
        assert_ne!(six, theta);
        assert!(!six.is_theta());
    }

    #[test]
    fn single_label_frame() {
        let frame = Frame::new(["X"], false).unwrap();
        let x = frame.set_of(["X"]).unwrap();
        assert!(x.is_theta());
        assert_eq!(x, frame.theta());
        assert_eq!(frame.theta().complement(), frame.empty_set());
    }

    #[test]
    fn rejects_bad_label_lists() {
        assert!(matches!(
            Frame::new(["A", "A"], false),
            Err(EvidenceError::DuplicateLabel(l)) if l == "A"
        ));
        assert!(matches!(
            Frame::new(["A", " A "], false),
            Err(EvidenceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            Frame::new(Vec::<String>::new(), true),
            Err(EvidenceError::EmptyFrame)
        ));
        assert!(matches!(
            Frame::new(["OTHER"], true),
            Err(EvidenceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            Frame::new(["", "B"], false),
            Err(EvidenceError::BlankLabel)
        ));
    }

    #[test]
    fn size_cap_counts_the_catch_all() {
        let labels: Vec<String> = (0..30).map(|i| format!("H{i}")).collect();
        assert!(Frame::new(&labels, false).is_ok());
        assert!(matches!(
            Frame::new(&labels, true),
            Err(EvidenceError::TooManyLabels { count: 31, max: 30 })
        ));
        assert!(Frame::new(&labels[..29], true).is_ok());
    }

    #[test]
    fn cross_frame_operations_fail() {
        let a = Frame::new(["A", "B"], false).unwrap();
        let b = Frame::new(["A", "C"], false).unwrap();
        let x = a.set_of(["A"]).unwrap();
        let y = b.set_of(["A"]).unwrap();
        assert!(matches!(x.intersect(&y), Err(EvidenceError::FrameMismatch)));
        assert!(matches!(x.is_subset_of(&y), Err(EvidenceError::FrameMismatch)));
    }

    #[test]
    fn structurally_equal_frames_interoperate() {
        let a = Frame::new(["A", "B"], false).unwrap();
        let b = Frame::new(["A", "B"], false).unwrap();
        let x = a.set_of(["A"]).unwrap();
        let y = b.set_of(["A", "B"]).unwrap();
        assert_eq!(x.intersect(&y).unwrap().labels(), vec!["A"]);
    }

    #[test]
    fn set_algebra_and_display() {
        let frame = Frame::new(DISEASES, true).unwrap();
        let a = frame.set_of(["AI", "ND", "FC"]).unwrap();
        let b = frame.set_of(["ND", "SHS"]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().labels(), vec!["ND"]);
        assert_eq!(a.union(&b).unwrap().len(), 4);
        assert_eq!(a.to_string(), "{AI, ND, FC}");
        assert_eq!(frame.theta().to_string(), "Θ");
        assert!(a.complement().contains(6));
        assert!(matches!(
            frame.set_of(["XX"]),
            Err(EvidenceError::UnknownLabel(_))
        ));
        assert!(frame.set_from_bits(1 << 7).is_err());
    }
}
