use thiserror::Error;

/// Errors raised by geometric constructors and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("direction needs dimension >= 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("vector norm {0} is not 1 within 1e-12")]
    NotUnit(f64),

    #[error("cannot normalize a (near-)zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("base-sphere radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("degenerate base circle: need |R-1| < d < R+1, got R={r}, d={d}")]
    DegenerateBase { r: f64, d: f64 },

    #[error("base-cap radius beta={0} outside (0, pi/2)")]
    BetaOutOfRange(f64),

    #[error("cone diameter exceeds d: 2R sin(beta) = {chord} > d = {d}")]
    ConeDiameterExceeded { chord: f64, d: f64 },

    #[error("cap radius {0} outside (0, pi)")]
    CapRadiusOutOfRange(f64),

    #[error("carrier radius must be positive, got {0}")]
    NonPositiveCarrier(f64),

    #[error("tangent direction not orthogonal to apex (|dot| = {0})")]
    TangentNotOrthogonal(f64),

    #[error("directions coincide (angle below 1e-12)")]
    CoincidentDirections,

    #[error("points {i} and {j} at angle {theta} violate the annulus [{psi}, pi - {psi}]")]
    AnnulusViolation {
        i: usize,
        j: usize,
        theta: f64,
        psi: f64,
    },

    #[error("alpha = {0} outside (0, pi/6]")]
    AlphaOutOfRange(f64),

    #[error("psi = {0} outside (0, pi/2)")]
    PsiOutOfRange(f64),

    #[error("resolution must be at least {min}, got {got}")]
    ResolutionTooSmall { min: usize, got: usize },

    #[error("count must be at least 1")]
    EmptyCount,

    #[error("mode {mode} not applicable: {reason}")]
    ModeMismatch { mode: &'static str, reason: String },

    #[error("configuration must contain at least one apex")]
    EmptyConfiguration,
}

pub type Result<T> = std::result::Result<T, Error>;
