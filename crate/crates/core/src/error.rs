use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("arccos argument {value} outside [-1, 1] beyond clamp tolerance")]
    OutOfClamp { value: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error {error:e}")]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("colouring is not antipodal: {0}")]
    NotAntipodal(String),

    #[error("no closed form for {label} at theta = {theta_over_pi}\u{3c0}: {branch}")]
    MissingBranch { label: String, theta_over_pi: f64, branch: String },

    #[error("no sign change of f - g found on the scan grid over [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { what, detail: detail.into() }
    }

    /// True for failures of a numerical engine rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::OutOfClamp { .. } | Error::NoCrossing { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
