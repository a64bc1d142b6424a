use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Weyl group exceeds the cap of {0} elements")]
    WeylGroupTooLarge(usize),
    #[error("weights are not quasi-symmetric")]
    NotQuasiSymmetric,
    #[error("weights do not span the character space")]
    DoesNotSpan,
    #[error("weights are not invariant under the Weyl group")]
    NotWeylInvariant,
    #[error("arrangement degenerate: {0}")]
    ArrangementDegenerate(String),
    #[error("point {0} lies on a wall")]
    OnWall(String),
    #[error("chambers are not adjacent (distance {0})")]
    NotAdjacent(usize),
    #[error("character {0} is not in the expected window difference")]
    NotInWindow(String),
    #[error("point is not on the boundary of the polytope")]
    NotOnBoundary,
    #[error("face is not dominant")]
    FaceNotDominant,
    #[error("weight {0} is singular")]
    Singular(String),
    #[error("operation requires a torus")]
    NotToric,
    #[error("degenerate face with d_plus = {0}")]
    DegenerateFace(usize),
    #[error("atom {0} is not attached to the wall")]
    NotAttached(String),
    #[error("polytope has no center")]
    NoCenter,
    #[error("SVG export needs rank at most 2, got {0}")]
    UnsupportedDimensionForSvg(usize),
    #[error("path error: {0}")]
    Path(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
