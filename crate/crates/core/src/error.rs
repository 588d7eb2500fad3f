use core::fmt;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An image dimension was zero.
    EmptyImage,
    /// Two images that must share dimensions do not.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// The requested window does not fit inside the image.
    WindowTooLarge {
        side: usize,
        width: usize,
        height: usize,
    },
    /// A parameter was out of its documented range.
    InvalidParam(&'static str),
    /// A divisor was zero or too close to zero to invert safely; the
    /// message names the offending quantity.
    DegenerateDivisor(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyImage => write!(f, "image has a zero dimension"),
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::WindowTooLarge {
                side,
                width,
                height,
            } => write!(
                f,
                "window of side {side} does not fit a {width}x{height} image"
            ),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DegenerateDivisor(what) => {
                write!(f, "zero or near-zero divisor: {what}")
            }
        }
    }
}

impl core::error::Error for Error {}
