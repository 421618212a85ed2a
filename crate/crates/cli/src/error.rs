use std::fmt;
use std::path::Path;

/// Process exit codes.
pub mod code {
    pub const OK: i32 = 0;
    pub const LIMIT_EXCEEDED: i32 = 2;
    pub const NON_TERMINATING: i32 = 3;
    pub const DEGENERATE: i32 = 4;
    pub const USAGE: i32 = 64;
    pub const NO_INPUT: i32 = 66;
    pub const CANT_CREATE: i32 = 73;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(code::USAGE, message)
    }

    pub fn input(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(code::NO_INPUT, format!("cannot read {}: {err}", path.display()))
    }

    pub fn output(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(code::CANT_CREATE, format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
