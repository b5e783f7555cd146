use num_complex::Complex64;
use thiserror::Error;

/// Failures raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("adaptive quadrature hit the subdivision limit ({subdivisions}) with estimate {estimate} and error {error:e}")]
    SubdivisionLimit {
        subdivisions: usize,
        estimate: Complex64,
        error: f64,
    },

    #[error("integrand returned a non-finite value at {at}")]
    NonFiniteEvaluation { at: Complex64 },

    #[error("integrand decays too slowly at infinity (|f(t)| t^2 = {at_1e5:e} at 1e5, {at_1e6:e} at 1e6)")]
    SlowDecay { at_1e5: f64, at_1e6: f64 },

    #[error("bracket [{lo}, {hi}] has no sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("leading coefficient of the cubic is zero")]
    DegenerateLeadingCoefficient,

    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),

    #[error("map evaluated at a singular argument {w}")]
    SingularArgument { w: Complex64 },

    #[error("point {w} lies on the segment [{from}, {to}]")]
    OnSegment {
        w: Complex64,
        from: Complex64,
        to: Complex64,
    },

    #[error("invalid map specification: {0}")]
    InvalidSpec(String),

    #[error("jet system for pole group {pole_index} is ill-conditioned (|psi'| = {derivative:e} at the reflected pole)")]
    IllConditionedJetSystem { pole_index: usize, derivative: f64 },

    #[error("test-function pole {z0} is within 1e-10 of a quadrature node")]
    NodeAtPole { z0: Complex64 },

    #[error("test-function pole {z0} is not outside the closed domain")]
    InadmissibleTestFunction { z0: Complex64 },

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("truncation tail {tail:e} exceeds the requested tolerance {tolerance:e}")]
    TruncationDominates { tail: f64, tolerance: f64 },

    #[error("auxiliary kernel points coincide")]
    CoincidentAuxPoints,

    #[error("point {z} lies inside the density support")]
    InsideSupport { z: Complex64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("log charges do not sum to zero (total {total})")]
    NonzeroTotalCharge { total: Complex64 },

    #[error("pole group index {0} out of range")]
    NoSuchPole(usize),

    #[error("parameter {name} = {value} is out of range: {reason}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("(a, b) = ({a}, {b}) lies on a type boundary")]
    UnclassifiedBoundary { a: f64, b: f64 },

    #[error("(a, b) = ({a}, {b}) is in the looped regime a > 4 b^3")]
    LoopedRegime { a: f64, b: f64 },

    #[error("operation not supported for this family kind")]
    UnsupportedKind,

    #[error("evaluation point {z} is not above the strip top {top}")]
    EvaluationBelowStrip { z: Complex64, top: f64 },

    #[error("contact curve leaves the strip ({0})")]
    CurveOutsideStrip(String),

    #[error("contact curve needs a horizontal line asymptote")]
    NonHorizontalAsymptote,

    #[error("residue route needs the curve as a conformal map")]
    RequiresMap,

    #[error("residue contour collides with the preimage of {z}")]
    ContourCollision { z: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;
