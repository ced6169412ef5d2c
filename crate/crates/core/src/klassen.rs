//! Klassen typology quadrants.
//!
//! A district sector is compared with the province on two axes: growth
//! (`v1` against `v3`) and contribution (`v2` against `v4`). Equality counts
//! as "high" on either axis.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::FeatureRow;
use crate::{Error, Result};

/// Klassen quadrant, numbered 1 to 4.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "u8", try_from = "u8"))]
pub struct Quadrant(u8);

impl Quadrant {
    /// High growth, high contribution.
    pub const DEVELOPED: Quadrant = Quadrant(1);
    /// Low growth, high contribution.
    pub const STAGNANT: Quadrant = Quadrant(2);
    /// High growth, low contribution.
    pub const DEVELOPING: Quadrant = Quadrant(3);
    /// Low growth, low contribution.
    pub const UNDERDEVELOPED: Quadrant = Quadrant(4);

    pub const ALL: [Quadrant; 4] = [
        Quadrant::DEVELOPED,
        Quadrant::STAGNANT,
        Quadrant::DEVELOPING,
        Quadrant::UNDERDEVELOPED,
    ];

    pub fn new(value: u8) -> Option<Quadrant> {
        (1..=4).contains(&value).then_some(Quadrant(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn describe(self) -> &'static str {
        match self.0 {
            1 => "developed",
            2 => "stagnant",
            3 => "developing",
            _ => "relatively underdeveloped",
        }
    }

    fn from_axes(high_growth: bool, high_contribution: bool) -> Quadrant {
        match (high_growth, high_contribution) {
            (true, true) => Quadrant::DEVELOPED,
            (false, true) => Quadrant::STAGNANT,
            (true, false) => Quadrant::DEVELOPING,
            (false, false) => Quadrant::UNDERDEVELOPED,
        }
    }
}

impl From<Quadrant> for u8 {
    fn from(q: Quadrant) -> u8 {
        q.0
    }
}

impl TryFrom<u8> for Quadrant {
    type Error = &'static str;

    fn try_from(value: u8) -> core::result::Result<Self, Self::Error> {
        Quadrant::new(value).ok_or("quadrant must be in 1..=4")
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Classifies one row.
pub fn classify_quadrant(row: &FeatureRow) -> Result<Quadrant> {
    if !row.is_finite() {
        return Err(Error::NonFinite { row: 0 });
    }
    Ok(Quadrant::from_axes(
        row.district_growth() >= row.province_growth(),
        row.district_contribution() >= row.province_contribution(),
    ))
}

/// Classifies every row; the first non-finite row aborts with its index.
pub fn classify_all(rows: &[FeatureRow]) -> Result<Vec<Quadrant>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| classify_quadrant(row).map_err(|_| Error::NonFinite { row: i }))
        .collect()
}
