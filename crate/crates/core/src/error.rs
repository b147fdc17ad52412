use thiserror::Error;

use crate::space::SpaceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a {expected:?} space, got {found:?}")]
    KindMismatch { expected: SpaceKind, found: SpaceKind },

    #[error("coefficient {name} = {value} is not strictly positive")]
    PositivityViolation { name: &'static str, value: f64 },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("[122] = 0 with [112] = 0: the space is a product of isotropy irreducible factors")]
    ProductSpace,

    #[error("y = {y} is not an Einstein direction (residual {residual:e})")]
    NotAnEinsteinRoot { y: f64, residual: f64 },

    #[error("state outside the Riemannian domain: {0}")]
    DomainError(String),

    #[error("first integral is singular at y = {y} (Einstein root {root})")]
    OnRoot { y: f64, root: f64 },

    #[error("initial direction y0 = {y0} lies on the Einstein root {root}")]
    OnEinsteinRoot { y0: f64, root: f64 },

    #[error("state norm {norm:e} exceeded the blow-up bound at t = {t}")]
    BlowupDetected { t: f64, norm: f64 },

    #[error("irreducible flow needs b > [111]/(2d), got C = {0}")]
    NonpositiveC(f64),

    #[error("backward run stopped at the step limit before the horizon")]
    InsufficientHorizon,

    #[error("trajectory did not end in a collapse event")]
    NotCollapsed,

    #[error("time {t} is outside the sampled range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("soliton limit could not be classified: {0}")]
    Unclassified(String),

    #[error("invalid integration options: {0}")]
    InvalidOptions(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownSpace(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
