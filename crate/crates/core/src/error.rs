use thiserror::Error;

/// Errors surfaced by the numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input {what} must be finite")]
    NonFinite { what: &'static str },

    #[error("degenerate profile: u'(s) <= 0 at sigma = {sigma}")]
    DegenerateProfile { sigma: f64 },

    #[error("pinching calibration failed for alpha = {alpha}, kappa = {kappa} (epsilon floor reached)")]
    CalibrationFailed { alpha: f64, kappa: f64 },

    #[error("hyperbolic calibration impossible: parabolic sum diverges at s = 1/2 (alpha <= 1)")]
    ParabolicSumDivergent,

    #[error("target {t} not bracketable by the profile range")]
    RangeError { t: f64 },

    #[error("root finder did not bracket the requested geometry (D = {d})")]
    GeometryError { d: f64 },

    #[error("quadrature failed to reach tolerance {tol} within {panels} panels (err = {err})")]
    AccuracyError { tol: f64, err: f64, panels: usize },

    #[error("boundary code depth insufficient for a stable value")]
    DepthError,

    #[error("model consistency violated: negative orbit distance {d} (junction defect too large)")]
    ModelConsistency { d: f64 },

    #[error("bracket endpoints yield the same verdict; no exponent crossing inside")]
    BracketError,

    #[error("verdict undecided at the current truncation")]
    Undecided,

    #[error("power iteration did not converge within {max_iter} iterations (residual {residual})")]
    SpectralError { residual: f64, max_iter: usize },

    #[error("operator has an infinite entry; spectral iteration not applicable")]
    InfiniteOperator,

    #[error("state-count guard: {states} cylinder states exceed the limit {limit}")]
    StateGuard { states: usize, limit: usize },

    #[error("enumeration guard: K*log2(2M) = {cost:.1} exceeds the budget {budget}")]
    EnumerationGuard { cost: f64, budget: f64 },

    #[error("bracket for a* not found below a_max = {a_max}")]
    AStarRange { a_max: f64 },

    #[error("monotonicity certificate failed: empirical ratio {rho} >= 1")]
    CertificateFailure { rho: f64 },

    #[error("word syntax error: {0}")]
    WordSyntax(String),
}

pub type Result<T> = std::result::Result<T, Error>;
