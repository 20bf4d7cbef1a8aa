use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// A configuration or parameter value violates its invariant.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    /// A series or quadrature hit its work limit before meeting its tolerance.
    #[error("{what} did not converge after {work} {unit}")]
    NonConvergence {
        what: &'static str,
        work: usize,
        unit: &'static str,
    },

    /// A quantity that must be real came back with a non-negligible imaginary part,
    /// or two independent evaluation routes disagree.
    #[error("numerical consistency failure in {what}: {detail}")]
    Consistency { what: &'static str, detail: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Consistency { .. })
    }
}
