use std::path::PathBuf;

use thiserror::Error;

use crate::error::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_OUTPUT: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("config file {path}: line {line}: {message}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing column {column:?} (header: {header})")]
    MissingColumn {
        path: PathBuf,
        column: String,
        header: String,
    },

    #[error("{path}: line {line}: column {column:?} holds malformed value {value:?}")]
    Malformed {
        path: PathBuf,
        line: u64,
        column: String,
        value: String,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: only {n} complete rows after cleaning; at least {min} are required")]
    TooFewRows { path: PathBuf, n: usize, min: usize },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigFile { .. } => EXIT_CONFIG,
            CliError::Unreadable { .. }
            | CliError::MissingColumn { .. }
            | CliError::Malformed { .. }
            | CliError::Csv { .. }
            | CliError::TooFewRows { .. } => EXIT_INPUT,
            CliError::Output { .. } => EXIT_OUTPUT,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Domain { .. } | CoreError::InvalidTheta { .. } | CoreError::InvalidArgument(_) => EXIT_CONFIG,
        CoreError::InsufficientData(_) | CoreError::TableFormat(_) => EXIT_INPUT,
        CoreError::NonConvergence { .. } | CoreError::Numeric(_) => EXIT_NUMERIC,
        CoreError::Replicate { source, .. } => core_exit_code(source),
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
