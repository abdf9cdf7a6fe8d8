use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`{}: {reason}", species.as_ref().map(|s| format!(" in [{s}]")).unwrap_or_default())]
    Invariant {
        species: Option<String>,
        field: &'static str,
        reason: String,
    },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unknown buffer gas `{0}`")]
    UnknownBuffer(String),

    #[error("degenerate denominator: w32*w23 >= Gamma3*Gamma2 ({value:e})")]
    DegenerateDenominator { value: f64 },

    #[error("singular population system (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error(
        "Doppler quadrature too coarse: node spacing {spacing:e} s^-1 exceeds homogeneous width {width:e} s^-1 (raise the node count)"
    )]
    QuadratureDegeneracy { spacing: f64, width: f64 },

    #[error("threshold curve has no root anywhere in the pressure range")]
    NoMinimum,

    #[error("no negative absorption anywhere in the search range")]
    NoGain,

    #[error("configuration error in `{field}`: {message}")]
    Config { field: &'static str, message: String },
}

impl Error {
    pub(crate) fn invariant(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invariant {
            species: None,
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_)
            | Error::SingularSystem { .. }
            | Error::DegenerateDenominator { .. }
            | Error::QuadratureDegeneracy { .. }
            | Error::NoMinimum
            | Error::NoGain => 2,
            _ => 1,
        }
    }
}
