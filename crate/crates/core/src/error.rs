use alloc::string::String;
use core::fmt;

/// Errors surfaced by geometry validation, sampling, and estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A region, annulus, ball, or event geometry failed validation.
    InvalidGeometry(String),
    /// A probability or other numeric parameter is out of its domain.
    InvalidParameter(String),
    /// A site was addressed outside the configuration's region.
    OutOfRegion { m: i32, n: i32 },
    /// An event was used with machinery that requires monotonicity.
    NonMonotoneEvent(String),
    /// Enumeration was requested on a region beyond the exact-arithmetic cap.
    RegionTooLarge { sites: usize, limit: usize },
    /// An estimation run could not produce a usable value.
    Estimation(String),
    /// A fit could not be performed on the supplied curve.
    Fit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::OutOfRegion { m, n } => {
                write!(f, "site ({m},{n}) lies outside the configuration region")
            }
            Error::NonMonotoneEvent(msg) => {
                write!(f, "event is not monotone increasing: {msg}")
            }
            Error::RegionTooLarge { sites, limit } => {
                write!(f, "region has {sites} sites, enumeration cap is {limit}")
            }
            Error::Estimation(msg) => write!(f, "estimation failed: {msg}"),
            Error::Fit(msg) => write!(f, "fit failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
