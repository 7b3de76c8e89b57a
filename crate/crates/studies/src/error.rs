use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum StudiesError {
    #[error(transparent)]
    Core(#[from] equil_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad field file: {0}")]
    Format(String),
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("bad norm request: {0}")]
    NormSpec(String),
}

pub type Result<T> = std::result::Result<T, StudiesError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> StudiesError {
    let path = path.into();
    move |source| StudiesError::Io { path, source }
}
