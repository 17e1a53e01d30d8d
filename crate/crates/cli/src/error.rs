//! Process-level error classification: the exit code encodes the failure
//! class (2 = configuration, 3 = numeric/runtime, 4 = failed `--check`).

use std::fmt;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Runtime(String),
    CheckFailed(Vec<String>),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        AppError::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Runtime(_) => 3,
            AppError::CheckFailed(_) => 4,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Runtime(m) => write!(f, "runtime error: {m}"),
            AppError::CheckFailed(items) => {
                writeln!(f, "check failed:")?;
                for item in items {
                    writeln!(f, "  {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for AppError {}

impl From<kspec::Error> for AppError {
    fn from(e: kspec::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Runtime(format!("i/o failure: {e}"))
    }
}
