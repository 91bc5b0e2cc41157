use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid query point")]
    InvalidQueryPoint,
    #[error("invalid Eulerian state: {0}")]
    InvalidEulerian(String),
    #[error("invalid Lagrangian state: {0}")]
    InvalidLagrangian(String),
    #[error("not a relabeling function: {0}")]
    NotRelabeling(String),
    #[error("{0}")]
    Config(String),
    #[error("blow-up at t = {t}: {what}")]
    BlowUp { t: f64, what: String },
    #[error("invalid peakon-antipeakon parameters: {0}")]
    OracleParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
