use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid electorate: {0}")]
    Electorate(String),

    #[error("invalid media configuration: {0}")]
    Media(String),

    #[error("invalid network configuration: {0}")]
    Network(String),

    #[error("invalid coordinates ({lat}, {lon})")]
    Coordinates { lat: f64, lon: f64 },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("sweep point {point} failed: {source}")]
    SweepPoint {
        point: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
