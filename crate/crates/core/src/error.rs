use thiserror::Error;

/// Everything that can go wrong while building states or running the oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("overflow in {func}: {detail}")]
    Overflow { func: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config line {line}: {detail}")]
    ConfigLine { line: usize, detail: String },

    #[error("norm drift {drift:.3e} exceeds {limit:.1e} (step too large or basis too small)")]
    NormDrift { drift: f64, limit: f64 },

    #[error("tail mass {mass:.3e} on the last {rows} basis states exceeds {limit:.1e}")]
    TailMass { mass: f64, rows: usize, limit: f64 },

    #[error("step-halving disagreement {diff:.3e} exceeds {limit:.1e}")]
    StepHalving { diff: f64, limit: f64 },

    #[error("conserved mu drifted by {drift:.3e} (limit {limit:.1e})")]
    MuDrift { drift: f64, limit: f64 },

    #[error("|f| and |g| coincide at t = {t}; the inverse Bogoliubov map is singular")]
    FgCrossing { t: f64 },

    #[error("squeeze parameter reached |zeta| = {modulus} at t = {t}")]
    SqueezeBlowup { t: f64, modulus: f64 },

    #[error("schedule is not positive definite at t = {t}: beta = {beta}, |alpha| = {alpha_abs}")]
    NotPositiveDefinite { t: f64, beta: f64, alpha_abs: f64 },

    #[error("truncation {given} too small: tail bound {bound:.3e} exceeds {limit:.1e}")]
    Truncation { given: usize, bound: f64, limit: f64 },

    #[error("coordinate representation requires epsilon = 2*ell + 1/2, got epsilon = {epsilon}")]
    Quantization { epsilon: f64 },

    #[error("Hamiltonian mapping undefined: Re(beta - alpha) = {value} gives a non-positive mass")]
    NegativeMass { value: f64 },

    #[error("quadrature did not converge: {detail}")]
    Quadrature { detail: String },

    #[error("completeness weight needs epsilon > 1, got {epsilon}")]
    CompletenessDomain { epsilon: f64 },

    #[error("asymptotic regime precondition violated: {detail}")]
    Regime { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
