use varsr_core::Error;

pub const VALIDATION: u8 = 1;
pub const IO: u8 = 2;
pub const CONFIG: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Failure::new(CONFIG, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. }
            | Error::MalformedHeader { .. }
            | Error::TruncatedPayload { .. }
            | Error::UnsupportedChannels { .. }
            | Error::UnsupportedFormat(_) => IO,
            Error::Config(_) | Error::Json(_) => CONFIG,
            _ => VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;
