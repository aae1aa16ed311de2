use alloc::string::String;

/// Errors raised by field construction, topology and threshold routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// The expected Euler characteristic never reaches `alpha` on the
    /// high-threshold bracket, so the approximation cannot be inverted there.
    #[error(
        "expected Euler characteristic at the bracket floor h = {floor} is {expected_ec}, \
         below alpha = {alpha}; the EC approximation only holds for sufficiently high \
         thresholds (enlarge the search region or lower alpha)"
    )]
    RegimeViolation {
        floor: f64,
        expected_ec: f64,
        alpha: f64,
    },

    #[error("no excursions above h = {0} in any replicate")]
    NoExcursions(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
