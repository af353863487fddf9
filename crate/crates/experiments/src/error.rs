use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error(transparent)]
    Core(#[from] korobov_relu::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("rate fit needs at least 3 positive points, {survivors} survived")]
    FitFailure { survivors: usize },
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, ExpError>;
