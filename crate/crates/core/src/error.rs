use thiserror::Error;

/// Errors raised by the physics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical Bloch vector: |w| = {norm} exceeds 1")]
    Unphysical { norm: f64 },

    #[error("inconsistent derivative for a pure state: |w . dw| = {overlap:e}")]
    InconsistentDerivative { overlap: f64 },

    #[error("integration failed at tau = {reached}: {reason}")]
    Integration { reached: f64, reason: String },

    #[error("no unique steady state: dissipator vanishes")]
    NoSteadyState,

    #[error("shielded regime: effective decay rate {gamma:e} gives no finite optimum")]
    Shielded { gamma: f64 },

    #[error("non-finite objective value {value} at tau = {tau}")]
    NonFinite { tau: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
