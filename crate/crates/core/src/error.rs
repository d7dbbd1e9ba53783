use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative frequency {0} is not accepted")]
    NegativeFrequency(f64),

    #[error("undamped resonance: permittivity has a pole at omega = {0}")]
    Pole(f64),

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("gain medium (eps_im = {0} < 0) is not supported")]
    GainMedium(f64),

    #[error("permittivity vanishes; longitudinal terms are singular")]
    SingularPermittivity,

    #[error("static permittivity {0} < 1")]
    StaticPermittivityBelowOne(f64),

    #[error("static permittivity unavailable: table does not reach omega = 0")]
    StaticNotCovered,

    #[error("grid has {0} points, at least {1} required")]
    GridTooShort(usize, usize),

    #[error("quadrature did not converge: difference {diff:e} exceeds tolerance {tol:e}")]
    NonConvergence { diff: f64, tol: f64 },

    #[error("dipole matrix element required for absolute rates")]
    MissingDipole,

    #[error("transverse rate never becomes negative for r in [{r_lo}, {r_hi}]; no lower bound on r")]
    NoSignChange { r_lo: f64, r_hi: f64 },

    #[error("minimum transverse rate decreases with r between r = {r_a} and r = {r_b}")]
    MonotonicityViolation { r_a: f64, r_b: f64 },

    #[error("table parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in CSV status columns.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NegativeFrequency(_) => "negative_frequency",
            Error::Pole(_) => "pole",
            Error::OutOfRange { .. } => "out_of_range",
            Error::GainMedium(_) => "gain_medium",
            Error::SingularPermittivity => "singular_permittivity",
            Error::StaticPermittivityBelowOne(_) => "static_below_one",
            Error::StaticNotCovered => "static_not_covered",
            Error::GridTooShort(..) => "grid_too_short",
            Error::NonConvergence { .. } => "non_convergence",
            Error::MissingDipole => "missing_dipole",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::MonotonicityViolation { .. } => "monotonicity_violation",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
