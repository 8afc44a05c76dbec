use thiserror::Error;

/// Failures raised by the geometric and algebraic layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate triangle: |signed area| below tolerance")]
    DegenerateTriangle,

    #[error("non-finite coordinate: {0}")]
    NonFinite(&'static str),

    #[error("invariant violated (linear independence): v1 and v2 are nearly dependent")]
    DegenerateInput,

    #[error("invariant violated (lambda positivity): lambda{index} = {value} is not a positive finite real")]
    NonPositiveLambda { index: usize, value: f64 },

    #[error("invariant violated (zero sum): v1 + v2 + v3 deviates from 0 by {residual:e}")]
    ZeroSum { residual: f64 },

    #[error("mark p{side} is not strictly interior to side {side}")]
    MarkNotInterior { side: usize },

    #[error("ambiguous Delaunay status: angle sums {0:?} have more than one value within tolerance of pi")]
    AmbiguousStatus([f64; 3]),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("edge {edge} bounds a non-convex quadrilateral; flip is not geometric")]
    NonConvexQuad { edge: usize },

    #[error("edge {edge} is glued to its own face")]
    SelfGluedEdge { edge: usize },

    #[error("no edge orbit with id {0}")]
    NoSuchEdge(usize),

    #[error("step limit of {0} flips exceeded")]
    StepLimitExceeded(usize),

    #[error("unsupported composition pair ({j},{i}); expected (3,2), (2,1) or (1,3)")]
    UnsupportedPair { j: usize, i: usize },

    #[error("flip index {0} is not in 1..=3")]
    BadFlipIndex(usize),

    #[error("input is not Delaunay: angle sum of pair {0} exceeds pi")]
    NotDelaunayInput(usize),

    #[error("matrix has negative determinant {0}")]
    NegativeDeterminant(f64),

    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),

    #[error("trace {0} is below 2")]
    TraceBelowTwo(f64),

    #[error("target component {0} is below 4")]
    BelowFour(f64),

    #[error("solutions do not follow the eight-triple table: {0}")]
    TableMismatch(String),
}

impl Error {
    /// Failures of a flip or solve procedure rather than of its input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(
            self,
            Error::StepLimitExceeded(_)
                | Error::NonConvexQuad { .. }
                | Error::SelfGluedEdge { .. }
                | Error::AmbiguousStatus(_)
                | Error::InvalidTriangulation(_)
                | Error::TableMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
