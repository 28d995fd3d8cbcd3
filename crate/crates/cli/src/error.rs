use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}{}: field `{field}`: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse { file: String, line: Option<usize>, field: String, message: String },
    #[error("{file}: unsupported format version {version}")]
    UnsupportedVersion { file: String, version: i64 },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] resfin_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
