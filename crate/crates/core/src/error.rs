use thiserror::Error;

use crate::fan::Fan;
use crate::polytope::ReflexivityWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polytope is not full-dimensional")]
    DegeneratePolytope,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polytope has non-integral vertices")]
    NotLattice,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0} (must be between 1 and 4)")]
    UnsupportedDimension(usize),
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("polytope is not reflexive: {0:?}")]
    NotReflexive(ReflexivityWitness),
    #[error("fan has no reflexive provenance")]
    NoProvenance,
    #[error("cone is not three-dimensional")]
    NotThreeDimensional,
    #[error("ray does not lie in the interior of a maximal cone")]
    RayNotInterior,
    #[error("containing cone is not smooth")]
    ConeNotSmooth,
    #[error("wall ({0}, {1}) is not a flop wall")]
    NotFlopWall(usize, usize),
    #[error("ray {0} is not contractible to a smooth point")]
    NotContractible(usize),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("anticanonical divisor is not nef")]
    NotNef,
    #[error("anticanonical divisor is not Cartier")]
    NotGorenstein,
    #[error("fan is not almost Fano")]
    NotAlmostFano,
    #[error("no curve of positive anticanonical degree")]
    NoPositiveCurve,
    #[error("fan is not projective (nef cone is not full-dimensional)")]
    NotProjective,
    #[error("base of fiber-type contraction is not recognized ({} rays in dimension {dim})", rays.len())]
    UnrecognizedBase { dim: usize, rays: Vec<Vec<i64>> },
    #[error("extremal ray is not of fiber type")]
    NotFiberType,
    #[error("flop budget of {budget} exceeded")]
    FlopBudgetExceeded { budget: usize, fan: Box<Fan> },
    #[error("search depth {0} exhausted before the frontier emptied")]
    DepthExceeded(usize),
    #[error("value does not fit in a 64-bit integer")]
    Overflow,
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
