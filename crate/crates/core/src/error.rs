use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("asymmetric damping (gamma_a = {gamma_a}, gamma_b = {gamma_b}); use the general steady-state path")]
    AsymmetricDamping { gamma_a: f64, gamma_b: f64 },
    #[error("negative pump power: {0} W")]
    NegativePower(f64),
    #[error("dissipative coupling is zero; the response cubic in |a0|^2 is undefined")]
    ZeroCoupling,
    #[error("degenerate response polynomial: no steady state at I = {0}")]
    Degenerate(f64),
    #[error("Kerr coefficient is zero; there is no bistability threshold")]
    ZeroKerr,
    #[error("no stable steady state at drive I = {0}")]
    NoStableRoot(f64),
    #[error("integration step underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("integration exceeded {0} steps")]
    StepLimit(usize),
    #[error("eigenvalue polishing did not converge (residual {0:e})")]
    NonConvergence(f64),
    #[error("probe matrix is singular at delta_p = {0}")]
    SingularM(f64),
    #[error("input must be positive: {0}")]
    NonPositiveInput(&'static str),
    #[error("transmission spectrum is flat")]
    FlatSpectrum,
    #[error("time-domain probe response did not converge: {0}")]
    NotConverged(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
