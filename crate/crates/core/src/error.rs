use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Two fields were combined that live on different grids.
    GridMismatch,
    NonFinite {
        context: &'static str,
    },
    /// A Strichartz triple outside the admissible set; names the violated constraint.
    Inadmissible {
        constraint: &'static str,
    },
    /// Data support plus horizon reaches the Dirichlet wall.
    GuardViolation {
        support: f64,
        horizon: f64,
        r_max: f64,
    },
    BlowUp {
        t: f64,
    },
    NonUniformSampling {
        index: usize,
    },
    Desynchronized {
        expected: f64,
        found: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid {name} = {value}: {reason}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected} samples, found {found}")
            }
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::Inadmissible { constraint } => {
                write!(f, "inadmissible Strichartz triple: violates {constraint}")
            }
            Error::GuardViolation { support, horizon, r_max } => write!(
                f,
                "propagation guard violated: support {support} + horizon {horizon} + 1 > r_max {r_max}"
            ),
            Error::BlowUp { t } => write!(f, "non-finite samples at t = {t}"),
            Error::NonUniformSampling { index } => {
                write!(f, "trajectory sampling is not uniform at sample {index}")
            }
            Error::Desynchronized { expected, found } => {
                write!(f, "component time {found} out of sync with {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}
