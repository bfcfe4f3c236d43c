//! Dempster-Shafer evidence: frames of discernment, hypothesis sets, mass
//! functions, Dempster's rule of combination, belief and plausibility.
//!
//! Subsets are `u32` bitmasks over the frame's label order, so a frame holds
//! at most [`MAX_FRAME_SIZE`] hypotheses. Every value here is immutable once
//! built and safe to share across threads.

mod combine;
mod frame;
mod mass;

pub use combine::{combine, combine_all, CombinationOutcome, TOTAL_CONFLICT_THRESHOLD};
pub use frame::{Frame, HypothesisSet, MAX_FRAME_SIZE, OTHER_LABEL};
pub use mass::{MassFunction, NORMALIZATION_TOLERANCE, PRUNE_THRESHOLD};

#[derive(Debug, thiserror::Error)]
pub enum EvidenceError {
    #[error("frame must contain at least one label")]
    EmptyFrame,
    #[error("frame labels must not be blank")]
    BlankLabel,
    #[error("duplicate frame label `{0}`")]
    DuplicateLabel(String),
    #[error("frame has {count} labels, at most {max} are supported")]
    TooManyLabels { count: usize, max: usize },
    #[error("label `{0}` is not in the frame")]
    UnknownLabel(String),
    #[error("index {index} is out of range for a frame of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bitmask {bits:#x} has members outside the frame")]
    BitsOutsideFrame { bits: u32 },
    #[error("hypothesis sets belong to different frames")]
    FrameMismatch,
    #[error("bpa must lie in (0, 1], got {0}")]
    InvalidBpa(f64),
    #[error("focal set must not be empty")]
    EmptyFocalSet,
    #[error("the empty set cannot carry mass")]
    MassOnEmptySet,
    #[error("invalid mass {mass} on {set}")]
    InvalidMass { set: String, mass: f64 },
    #[error("masses sum to {total}, expected 1")]
    NotNormalized { total: f64 },
    #[error("evidence is totally contradictory (K = {conflict})")]
    TotalConflict { conflict: f64 },
    #[error("no mass functions to combine")]
    NothingToCombine,
    #[error("combination step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<EvidenceError>,
    },
}
