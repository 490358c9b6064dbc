use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("{what} did not converge (estimated relative error {estimate:.3e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "derivative routes disagree: semi-analytic {analytic:.9e}, finite-difference {finite_difference:.9e}"
    )]
    RouteDisagreement { analytic: f64, finite_difference: f64 },

    #[error("second-derivative stencil too noisy (estimated relative error {0:.3e})")]
    StencilNoise(f64),

    #[error("matrix dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { func, detail: detail.into() }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
