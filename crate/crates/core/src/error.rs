use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A series needs at least two yearly values.
    TooShort {
        len: usize,
    },
    /// Growth is undefined when the base year amount is zero.
    ZeroBaseYear {
        year: i32,
    },
    /// Two series that must cover the same years do not.
    YearMismatch,
    /// Years in a series are not strictly increasing.
    UnorderedYears {
        year: i32,
    },
    /// Total GDP is zero (or negative) for a year.
    ZeroTotal {
        year: i32,
    },
    /// An amount is negative or not finite.
    InvalidAmount {
        year: i32,
    },
    /// The reference level lacks a sector present in a district.
    MissingSector {
        sector: &'static str,
    },
    /// The same (region, sector) pair appears twice.
    DuplicateSeries {
        sector: &'static str,
    },
    /// More than one region provides the reference (province) level.
    AmbiguousProvince,
    /// A feature has zero variance and cannot be standardized.
    ZeroVariance {
        feature: usize,
    },
    /// A row holds a NaN or infinite value.
    NonFinite {
        row: usize,
    },
    EmptyInput,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    LengthMismatch {
        left: usize,
        right: usize,
    },
    UnknownLabel(u32),
    /// Too many distinct labels for exhaustive alignment.
    TooManyLabels {
        found: usize,
        max: usize,
    },
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooShort { len } => {
                write!(f, "series has {len} value(s), at least 2 are required")
            }
            Error::ZeroBaseYear { year } => write!(f, "zero base-year amount in {year}"),
            Error::YearMismatch => f.write_str("series do not cover the same years"),
            Error::UnorderedYears { year } => {
                write!(f, "years are not strictly increasing at {year}")
            }
            Error::ZeroTotal { year } => write!(f, "total GDP is not positive in {year}"),
            Error::InvalidAmount { year } => {
                write!(f, "amount for {year} is negative or not finite")
            }
            Error::MissingSector { sector } => {
                write!(f, "province data has no series for sector `{sector}`")
            }
            Error::DuplicateSeries { sector } => {
                write!(f, "duplicate series for sector `{sector}`")
            }
            Error::AmbiguousProvince => f.write_str("more than one province region in panel"),
            Error::ZeroVariance { feature } => {
                write!(f, "feature {feature} has zero variance")
            }
            Error::NonFinite { row } => write!(f, "row {row} contains a non-finite value"),
            Error::EmptyInput => f.write_str("no rows"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected dimension {expected}, found {found}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::UnknownLabel(label) => write!(f, "label {label} is not part of the model"),
            Error::TooManyLabels { found, max } => {
                write!(f, "{found} distinct labels, alignment supports at most {max}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
