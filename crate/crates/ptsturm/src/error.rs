//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("eps = {0} outside the admissible range (0, pi/2)")]
    EpsOutOfRange(f64),

    #[error("coefficient must be positive on (0, pi): f({x}) = {value}")]
    NonPositiveCoefficient { x: f64, value: f64 },

    #[error("endpoint slope f'(0) = {0} violates the normalization 2/pi")]
    BadEndpointSlope(f64),

    #[error("custom profile needs samples covering (0, pi)")]
    InsufficientSamples,

    #[error("quadrature did not converge: endpoint too close")]
    QuadratureEndpoint,

    #[error("resonant order unsupported: nu = {0} is an integer")]
    ResonantOrder(f64),

    #[error("argument out of supported range: {0}")]
    ArgumentOutOfRange(String),

    #[error("frobenius offset too large for the requested tolerance: shrink delta (estimated remainder {est:.3e} > {tol:.3e})")]
    ShrinkDelta { est: f64, tol: f64 },

    #[error("frobenius offset underflow: delta = {0} below the minimum offset")]
    OffsetUnderflow(f64),

    #[error("step-size underflow at x = {x}: approach endpoint via frobenius basis instead")]
    StepSizeUnderflow { x: f64 },

    #[error("state overflowed or became non-finite: lambda outside stable range")]
    UnstableLambda,

    #[error("|lambda| = {0} exceeds the stable-range guard")]
    LambdaTooLarge(f64),

    #[error("ill-conditioned endpoint match")]
    IllConditionedMatch,

    #[error("pole/zero proximity: |g(z)| = {0:.3e} below the underflow guard")]
    PoleProximity(f64),

    #[error("root search failed after {refinements} grid refinements; scanned {evals} points on [{lo}, {hi}], found {found} of {wanted}")]
    MissedBracket {
        refinements: usize,
        evals: usize,
        lo: f64,
        hi: f64,
        found: usize,
        wanted: usize,
    },

    #[error("root too close to contour")]
    RootNearContour,

    #[error("eigensolver did not converge")]
    EigensolverFailed,

    #[error("hardy check: support of w must lie strictly inside (0, b)")]
    SupportTouchesEndpoint,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
