use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no horizon gap: {0}")]
    NoHorizonGap(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("quadratic form `{form}` is negative: {value:e} (scale {scale:e})")]
    NegativeQuadraticForm { form: &'static str, value: f64, scale: f64 },

    #[error("evolution blew up at t = {t}: norm ratio {ratio:e}")]
    Blowup { t: f64, ratio: f64 },

    #[error("no convergence by t = {t_max}: last Cauchy difference {tail:e}, tol {tol:e}, fitted decay rate {rate:.4}")]
    NoConvergence { t_max: f64, tail: f64, tol: f64, rate: f64 },

    #[error("trace did not stabilize: residual {residual:e} > tol {tol:e}")]
    NoStabilization { residual: f64, tol: f64 },

    #[error("admissibility violated: phased integral {value:e}")]
    Admissibility { value: f64 },

    #[error("membership violated: relative residual {value:e}")]
    Membership { value: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
