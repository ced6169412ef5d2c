//! Raw GDP panel CSV: `region_id,region_kind,sector,year,amount`.
//!
//! One line per region, sector and year. The sector may also be `total`,
//! which supplies an explicit total GDP for that region instead of the sum
//! of its sectors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gdpsom_core::dataset::{
    build_feature_rows_with, ContributionBase, FeatureOptions, FeatureRow, RegionKind, Sector, SectorSeries,
};

use crate::{Error, Result};

const COLUMNS: [&str; 5] = ["region_id", "region_kind", "sector", "year", "amount"];

/// `(region_id, kind, yearly values)` from rows whose sector is `total`.
pub type ExplicitTotal = (String, RegionKind, Vec<(i32, f64)>);

#[derive(Clone, Debug, Default)]
pub struct Panel {
    pub series: Vec<SectorSeries>,
    pub totals: Vec<ExplicitTotal>,
}

impl Panel {
    pub fn is_empty(&self) -> bool {
        self.series.is_empty() && self.totals.is_empty()
    }

    fn of_kind(&self, kind: RegionKind) -> Vec<SectorSeries> {
        self.series.iter().filter(|s| s.kind() == kind).cloned().collect()
    }

    /// Derives one feature row per district sector.
    pub fn feature_rows(&self, base: ContributionBase) -> Result<Vec<FeatureRow>> {
        let district = self.of_kind(RegionKind::District);
        let province = self.of_kind(RegionKind::Province);
        if district.is_empty() {
            return Err(Error::Invalid("panel has no district rows".into()));
        }
        if province.is_empty() {
            return Err(Error::Invalid("panel has no province rows".into()));
        }
        let total_of = |kind: RegionKind| {
            self.totals
                .iter()
                .filter(move |(_, k, _)| *k == kind)
                .map(|(id, _, v)| (id.clone(), v.clone()))
        };
        let options = FeatureOptions {
            province_total: total_of(RegionKind::Province).next().map(|(_, v)| v),
            district_totals: total_of(RegionKind::District).collect(),
            contribution_base: base,
        };
        Ok(build_feature_rows_with(&district, &province, &options)?)
    }
}

type SeriesKey = (String, RegionKind, Option<Sector>);

pub fn load_panel_csv(path: &Path) -> Result<Panel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_panel_csv(&text, path)
}

pub fn parse_panel_csv(text: &str, path: &Path) -> Result<Panel> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.into(),
            source,
        })?
        .clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn {
                path: path.into(),
                column: name.into(),
            })?;
    }

    // Keyed by first appearance; the value keeps the line of each year.
    let mut order: Vec<SeriesKey> = Vec::new();
    let mut groups: BTreeMap<usize, BTreeMap<i32, (f64, u64)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.into(),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |reason: String| Error::MalformedRow {
            path: path.into(),
            line,
            reason,
        };
        if record.len() != headers.len() {
            return Err(malformed(format!(
                "expected {} fields, found {}",
                headers.len(),
                record.len()
            )));
        }
        let region = record[idx[0]].to_string();
        if region.is_empty() {
            return Err(malformed("empty region_id".into()));
        }
        let kind = RegionKind::parse(&record[idx[1]])
            .ok_or_else(|| malformed(format!("unknown region_kind `{}`", &record[idx[1]])))?;
        let sector_field = &record[idx[2]];
        let sector = if sector_field.eq_ignore_ascii_case("total") {
            None
        } else {
            Some(Sector::parse(sector_field).ok_or_else(|| malformed(format!("unknown sector `{sector_field}`")))?)
        };
        let year: i32 = record[idx[3]]
            .parse()
            .map_err(|_| malformed(format!("year `{}` is not an integer", &record[idx[3]])))?;
        let amount: f64 = record[idx[4]]
            .parse()
            .ok()
            .filter(|a: &f64| a.is_finite() && *a >= 0.0)
            .ok_or_else(|| malformed(format!("amount `{}` is not a non-negative number", &record[idx[4]])))?;

        let key = (region, kind, sector);
        let slot = match order.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                order.push(key);
                order.len() - 1
            }
        };
        if groups.entry(slot).or_default().insert(year, (amount, line)).is_some() {
            return Err(malformed(format!("duplicate year {year} for this region and sector")));
        }
    }

    let mut panel = Panel::default();
    for (slot, (region, kind, sector)) in order.into_iter().enumerate() {
        let values: Vec<(i32, f64)> = groups[&slot].iter().map(|(&y, &(a, _))| (y, a)).collect();
        match sector {
            Some(sector) => panel.series.push(SectorSeries::new(region, kind, sector, values)?),
            None => panel.totals.push((region, kind, values)),
        }
    }
    Ok(panel)
}
