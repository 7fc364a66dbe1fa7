use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed configuration at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] horoscope::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
