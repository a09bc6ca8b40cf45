use std::path::PathBuf;

/// Errors raised while loading resources or running correctors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Invalid or missing configuration (flags, fractions, resources).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside an operation's domain (empty list, zero vector, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("model file error: {0}")]
    Model(String),

    #[error("loss became NaN at epoch {epoch}, batch {batch}")]
    NanLoss { epoch: usize, batch: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Reads a UTF-8 text file and yields `(line_number, line)` pairs with the
/// line terminator (LF or CRLF) removed. Invalid UTF-8 is reported with
/// the offending line number.
pub(crate) fn read_lines(path: &std::path::Path) -> Result<Vec<(usize, String)>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    split_lines(&bytes, path)
}

pub(crate) fn split_lines(bytes: &[u8], path: &std::path::Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    if bytes.is_empty() {
        return Ok(out);
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    for (i, raw) in body.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw)
            .map_err(|e| Error::parse(path, i + 1, format!("invalid UTF-8: {e}")))?;
        out.push((i + 1, line.to_string()));
    }
    Ok(out)
}
