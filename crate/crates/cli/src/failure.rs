use std::fmt;

pub const CHECK_FAILED: u8 = 1;
pub const USAGE: u8 = 2;
pub const IO: u8 = 3;
pub const DEGENERATE: u8 = 4;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Self {
            code: USAGE,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Tags a result's error with an exit code.
pub trait ExitCodeExt<T> {
    fn or_usage(self) -> CliResult<T>;
    fn or_io(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> ExitCodeExt<T> for Result<T, E> {
    fn or_usage(self) -> CliResult<T> {
        self.map_err(|e| Failure {
            code: USAGE,
            error: e.into(),
        })
    }

    fn or_io(self) -> CliResult<T> {
        self.map_err(|e| Failure {
            code: IO,
            error: e.into(),
        })
    }
}
