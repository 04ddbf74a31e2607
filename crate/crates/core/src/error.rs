use nalgebra::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("shift {lambda} lies in the spectrum (nearest eigenvalue {}{:+}i)", nearest.re, nearest.im)]
    Singular { lambda: f64, nearest: Complex<f64> },

    #[error("norm of the exponential overflowed at t = {t}; retry with a smaller t_max")]
    Scale { t: f64 },

    #[error("no positivity onset found up to the horizon t_max = {t_max}")]
    Horizon { t_max: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid operator spec: {0}")]
    Spec(String),

    #[error("dominant eigenvalue {re}{im:+}i is not real")]
    NonPerron { re: f64, im: f64 },

    #[error("eigenvalue {intruder} lies inside the sweep window around {lambda0}")]
    Isolation { lambda0: f64, intruder: f64 },

    #[error(
        "periodic box too small: variation {variation:e} near the box edge at t = {t} exceeds the guard {limit:e}"
    )]
    Truncation { t: f64, variation: f64, limit: f64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}
