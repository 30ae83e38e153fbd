use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid metric spec: {0}")]
    InvalidSpec(String),
    #[error("scalar-curvature gate failed: max |s| = {max:.3e} exceeds {tol:.1e}")]
    CurvatureGate { max: f64, tol: f64 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("point at radius {radius} lies below the chart inner radius {inner}")]
    BelowInnerRadius { radius: f64, inner: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("finite-difference step underflow (h = {0})")]
    StepUnderflow(f64),
    #[error("metric is not positive definite at radius {0}")]
    NotPositiveDefinite(f64),
    #[error("|z|^2 = {value} is below the potential's domain floor {floor}")]
    BelowDomainFloor { value: f64, floor: f64 },
    #[error("insufficient radius range: {0}")]
    InsufficientRange(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("extrapolation fit diverged: {0}")]
    FitDivergence(String),
    #[error("non-integrable tail: shell integrals decay like rho^{slope:.3}")]
    NonIntegrableTail { slope: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(
        "inconsistent surface block: classes {0} and {1} both have positive square but pair to {2}"
    )]
    InconsistentBlock(usize, usize, String),
    #[error("invalid cyclic type ({q}, {p}): {reason}")]
    InvalidCyclicType { q: i64, p: i64, reason: String },
    #[error("action ({q}, {p}) is not free: element {element} fixes the {axis} axis")]
    NotFree {
        q: i64,
        p: i64,
        element: i64,
        axis: &'static str,
    },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("group closure exceeded {0} elements")]
    ClosureCapExceeded(usize),
    #[error("capsule profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("radial primitive leaves a closed residual of size {residual:.3e} (tolerance {tol:.1e}); a correction beta with d(beta) = alpha on S^3 is required and not supported")]
    PrimitiveResidual { residual: f64, tol: f64 },
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("flow left the certified region: {0}")]
    FlowEscaped(String),
}
