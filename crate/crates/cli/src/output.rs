use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::output(path, e))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

/// `out` with its extension replaced by `ext`.
pub fn sibling(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}

/// A streamed trace file, or nothing.
pub struct Trace {
    sink: Option<(PathBuf, BufWriter<File>)>,
    failed: Option<std::io::Error>,
}

impl Trace {
    pub fn create(path: Option<PathBuf>) -> Result<Self, CliError> {
        let sink = match path {
            Some(p) => {
                let f = File::create(&p).map_err(|e| CliError::output(&p, e))?;
                Some((p, BufWriter::new(f)))
            }
            None => None,
        };
        Ok(Trace { sink, failed: None })
    }

    pub fn enabled(&self) -> bool {
        self.sink.is_some()
    }

    pub fn line(&mut self, line: &str) {
        if let Some((_, w)) = &mut self.sink {
            if self.failed.is_none() {
                if let Err(e) = writeln!(w, "{line}") {
                    self.failed = Some(e);
                }
            }
        }
    }

    /// Flushes the trace and returns its path.
    pub fn finish(self) -> Result<Option<PathBuf>, CliError> {
        match self.sink {
            Some((p, mut w)) => {
                if let Some(e) = self.failed {
                    return Err(CliError::output(&p, e));
                }
                w.flush().map_err(|e| CliError::output(&p, e))?;
                Ok(Some(p))
            }
            None => Ok(None),
        }
    }
}
