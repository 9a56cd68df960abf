//! Error types shared across the toolkit.

use thiserror::Error;

/// Everything that can go wrong while analyzing a presentation or running
/// the transition pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty generator set cannot express a nonzero target")]
    EmptyGeneratorSet,

    #[error("rows do not span the ambient space; overlattice has infinite index")]
    NotFiniteIndex,

    #[error("anticone family is not upward closed: superset {superset:?} of anticone {anticone:?} is infeasible")]
    NotUpwardClosed {
        anticone: Vec<usize>,
        superset: Vec<usize>,
    },

    #[error("extended vector b_{index} lies in no cone of the fan")]
    ExtendedVectorOutsideSupport { index: usize },

    #[error("extended vector b_{index} is contained in incompatible minimal cones")]
    AmbiguousMinimalCone { index: usize },

    #[error("maximal cone {cone:?} has linearly dependent rays")]
    NonSimplicial { cone: Vec<usize> },

    #[error("fan is not pure full-dimensional: {reason}")]
    NotPureFullDimensional { reason: String },

    #[error("sector bijection with the base presentation failed: {reason}")]
    BijectionFailure { reason: String },

    #[error("blow-up center {center:?} does not span a cone of the fan")]
    CenterNotCone { center: Vec<usize> },

    #[error("blow-up center {center:?} meets the extended set {s:?}")]
    CenterMeetsExtendedSet { center: Vec<usize>, s: Vec<usize> },

    #[error("stability condition lies on a wall of the secondary fan")]
    OmegaOnWall,

    #[error("user-supplied epsilon changes the chamber: {detail}")]
    ChamberChanged { detail: String },

    #[error("support-function data is inconsistent on a shared face: {detail}")]
    InconsistentOnSharedFace { detail: String },

    #[error("divisor polytope is unbounded; the presentation is not proper")]
    UnboundedPolytope,

    #[error("chambers do not share a codimension-one wall")]
    NoCommonWall,

    #[error("graded ring does not vanish above its degree cap: dimension {dim} in degree {degree}")]
    NonvanishingAboveCap { degree: usize, dim: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("double description limit exceeded: dim {dim} > 12 or {generators} generators > 64")]
    DoubleDescriptionLimit { dim: usize, generators: usize },

    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
