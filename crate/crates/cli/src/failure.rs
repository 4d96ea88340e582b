use optomech::Error;

pub const CONFIG: u8 = 2;
pub const NUMERIC: u8 = 3;
pub const NO_CONVERGENCE: u8 = 4;

/// A failed command: message for stderr and the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: CONFIG, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Config(_) | Error::Parse(_) | Error::Io(_) => CONFIG,
            Error::Instability(_) | Error::Singular(_) => NUMERIC,
            Error::Convergence(_) => NO_CONVERGENCE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::config(format!("JSON: {e}"))
    }
}
