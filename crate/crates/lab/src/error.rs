use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical abort: {0}")]
    Numerical(#[from] h3wave::Error),
    #[error("{0} check(s) failed")]
    Checks(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// 2 for configuration problems, 3 for numerical aborts, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Checks(_) | LabError::Io(_) | LabError::Csv(_) => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
