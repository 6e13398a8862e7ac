use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure of a core operation.
///
/// Variants follow the three ways a call can be rejected: shapes that do not
/// line up, values outside an operation's domain, and malformed arguments.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Image or map dimensions (or channel counts) are incompatible.
    Dimension(String),
    /// A value lies outside the domain the operation is defined on.
    Domain(String),
    /// An argument or configuration is malformed.
    Argument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Argument(msg) => write!(f, "argument error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
