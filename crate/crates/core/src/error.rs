use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or evaluating a basis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bicomplex number is a zero divisor (|W conj(W)| = {product:e}, |W|^2 = {norm_sq:e})")]
    ZeroDivisor { product: f64, norm_sq: f64 },

    #[error("series did not converge after {terms} terms (last term {last_term:e}, sum {sum:e})")]
    NoConvergence {
        terms: usize,
        last_term: f64,
        sum: f64,
    },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("f vanishes near r = {r} (|f| = {value:e})")]
    VanishingF { r: f64, value: f64 },

    #[error("no radial profile of degree {0}")]
    MissingProfile(usize),

    #[error("degree {degree} outside the available range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("point at |z| = {modulus} lies outside the disk of radius {radius}")]
    OutsideDomain { modulus: f64, radius: f64 },

    #[error("quadrature produced a non-finite value at r = {r}")]
    QuadratureFailure { r: f64 },

    #[error("non-finite sample in integrand")]
    NonFinite,

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profiles live on different radial grids")]
    GridMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDivisor { .. } => "ZeroDivisor",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::VanishingF { .. } => "VanishingF",
            Error::MissingProfile(_) => "MissingProfile",
            Error::DegreeOutOfRange { .. } => "DegreeOutOfRange",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NonFinite => "NonFinite",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GridMismatch => "GridMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
            Error::Format(_) => "Format",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Format(err.to_string())
    }
}
