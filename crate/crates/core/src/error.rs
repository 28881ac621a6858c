use thiserror::Error;

/// Errors raised by the analytic kernels, the dynamics and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("result overflows the double range: {0}")]
    Overflow(String),

    #[error("result underflows the double range: {0}")]
    Underflow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: estimate {estimate_re:e}{estimate_im:+e}i, error estimate {error_estimate:e}")]
    NonConvergence {
        estimate_re: f64,
        estimate_im: f64,
        error_estimate: f64,
    },

    #[error("wave function reaches the grid boundary: edge density {edge_density:e} at t = {time}")]
    BoundaryContamination { edge_density: f64, time: f64 },

    #[error("non-finite value {value} at {context}")]
    NonFinite { value: f64, context: String },

    #[error("evaluation failed at {context}: {source}")]
    AtPoint {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attach grid or scan coordinates to an error.
    pub fn at(self, context: impl Into<String>) -> Self {
        Error::AtPoint {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
