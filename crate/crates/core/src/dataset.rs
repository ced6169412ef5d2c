//! Sector panels and the four-feature rows derived from them.
//!
//! A feature row compares one district sector against the same sector of the
//! province: average growth and average contribution at both levels.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::stats;
use crate::{Error, Result};

/// Number of features in a [`FeatureRow`].
pub const FEATURES: usize = 4;

/// The nine GDP sectors.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sector {
    Agriculture,
    Mining,
    Manufacturing,
    Utilities,
    Construction,
    Trade,
    Transport,
    Finance,
    Services,
}

impl Sector {
    pub const ALL: [Sector; 9] = [
        Sector::Agriculture,
        Sector::Mining,
        Sector::Manufacturing,
        Sector::Utilities,
        Sector::Construction,
        Sector::Trade,
        Sector::Transport,
        Sector::Finance,
        Sector::Services,
    ];

    /// Canonical identifier used in CSV files.
    pub fn name(self) -> &'static str {
        match self {
            Sector::Agriculture => "agriculture",
            Sector::Mining => "mining",
            Sector::Manufacturing => "manufacturing",
            Sector::Utilities => "utilities",
            Sector::Construction => "construction",
            Sector::Trade => "trade",
            Sector::Transport => "transport",
            Sector::Finance => "finance",
            Sector::Services => "services",
        }
    }

    /// Parses a canonical name or one of the long statistical-office labels
    /// (case-insensitive, `_`/`-`/space treated alike).
    pub fn parse(s: &str) -> Option<Sector> {
        let norm: String = s
            .trim()
            .chars()
            .map(|c| match c {
                '_' | '-' | '&' | ',' => ' ',
                c => c.to_ascii_lowercase(),
            })
            .collect();
        let norm: Vec<&str> = norm.split_whitespace().collect();
        let key = norm.join(" ");
        let sector = match key.as_str() {
            "agriculture" => Sector::Agriculture,
            "mining" | "mining and quarrying" | "mining quarrying" => Sector::Mining,
            "manufacturing" | "manufacturing industry" => Sector::Manufacturing,
            "utilities" | "electricity gas and water" | "electricity gas water" => Sector::Utilities,
            "construction" | "building" => Sector::Construction,
            "trade" | "commerce hotel and restaurant" | "trade hotel and restaurant" => Sector::Trade,
            "transport" | "transport and communications" | "transport and communication" => Sector::Transport,
            "finance" | "finance leasing and services agency" | "finance leasing and business services" => {
                Sector::Finance
            }
            "services" => Sector::Services,
            _ => return None,
        };
        Some(sector)
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RegionKind {
    District,
    Province,
}

impl RegionKind {
    pub fn parse(s: &str) -> Option<RegionKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "district" | "regency" | "city" => Some(RegionKind::District),
            "province" => Some(RegionKind::Province),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionKind::District => "district",
            RegionKind::Province => "province",
        }
    }
}

/// `(year, amount)` pairs in strictly increasing year order.
pub type YearlyValues = [(i32, f64)];

fn check_yearly(values: &YearlyValues) -> Result<()> {
    for (i, &(year, amount)) in values.iter().enumerate() {
        if !amount.is_finite() || amount < 0.0 {
            return Err(Error::InvalidAmount { year });
        }
        if i > 0 && values[i - 1].0 >= year {
            return Err(Error::UnorderedYears { year });
        }
    }
    Ok(())
}

/// Yearly GDP amounts of one sector in one region.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSeries {
    region_id: String,
    kind: RegionKind,
    sector: Sector,
    values: Vec<(i32, f64)>,
}

impl SectorSeries {
    /// Builds a series, rejecting unordered years and negative or
    /// non-finite amounts.
    pub fn new(
        region_id: impl Into<String>,
        kind: RegionKind,
        sector: Sector,
        values: Vec<(i32, f64)>,
    ) -> Result<Self> {
        check_yearly(&values)?;
        Ok(SectorSeries {
            region_id: region_id.into(),
            kind,
            sector,
            values,
        })
    }

    pub fn region_id(&self) -> &str {
        &self.region_id
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn values(&self) -> &YearlyValues {
        &self.values
    }
}

/// Year-over-year growth in percent: `100 * (x[t+1] - x[t]) / x[t]`.
pub fn growth_series(values: &YearlyValues) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::TooShort { len: values.len() });
    }
    values
        .windows(2)
        .map(|w| {
            let (year, base) = w[0];
            if base == 0.0 {
                return Err(Error::ZeroBaseYear { year });
            }
            Ok(100.0 * (w[1].1 - base) / base)
        })
        .collect()
}

/// Share of `total` held by `sector`, in percent, year by year.
pub fn contribution_series(sector: &YearlyValues, total: &YearlyValues) -> Result<Vec<f64>> {
    if sector.len() != total.len() {
        return Err(Error::YearMismatch);
    }
    sector
        .iter()
        .zip(total)
        .map(|(&(year, amount), &(total_year, total_amount))| {
            if year != total_year {
                return Err(Error::YearMismatch);
            }
            if !(total_amount > 0.0) {
                return Err(Error::ZeroTotal { year });
            }
            Ok(100.0 * amount / total_amount)
        })
        .collect()
}

/// Sums several series year by year. All series must cover the same years.
pub fn total_series<'a>(series: impl IntoIterator<Item = &'a YearlyValues>) -> Result<Vec<(i32, f64)>> {
    let mut iter = series.into_iter();
    let mut total: Vec<(i32, f64)> = match iter.next() {
        Some(first) => first.to_vec(),
        None => return Err(Error::EmptyInput),
    };
    for s in iter {
        if s.len() != total.len() {
            return Err(Error::YearMismatch);
        }
        for (acc, &(year, amount)) in total.iter_mut().zip(s) {
            if acc.0 != year {
                return Err(Error::YearMismatch);
            }
            acc.1 += amount;
        }
    }
    Ok(total)
}

/// One observation: district growth/contribution against the province.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureRow {
    /// `[v1, v2, v3, v4]`: district average growth, district average
    /// contribution, province average growth, province average contribution.
    pub values: [f64; FEATURES],
    pub region_id: Option<String>,
    pub sector: Option<String>,
}

impl FeatureRow {
    pub fn new(v1: f64, v2: f64, v3: f64, v4: f64) -> Self {
        FeatureRow {
            values: [v1, v2, v3, v4],
            region_id: None,
            sector: None,
        }
    }

    pub fn with_provenance(mut self, region_id: impl Into<String>, sector: impl Into<String>) -> Self {
        self.region_id = Some(region_id.into());
        self.sector = Some(sector.into());
        self
    }

    pub fn district_growth(&self) -> f64 {
        self.values[0]
    }

    pub fn district_contribution(&self) -> f64 {
        self.values[1]
    }

    pub fn province_growth(&self) -> f64 {
        self.values[2]
    }

    pub fn province_contribution(&self) -> f64 {
        self.values[3]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl AsRef<[f64]> for FeatureRow {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Which total GDP the district contribution is measured against.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum ContributionBase {
    /// District sector amount as a share of the province's total GDP.
    #[default]
    Province,
    /// District sector amount as a share of the district's own total GDP.
    Region,
}

/// Totals and options for [`build_feature_rows_with`].
#[derive(Clone, Debug, Default)]
pub struct FeatureOptions {
    /// Explicit province total; the sum of the province sectors otherwise.
    pub province_total: Option<Vec<(i32, f64)>>,
    /// Explicit district totals keyed by region id; used with
    /// [`ContributionBase::Region`].
    pub district_totals: Vec<(String, Vec<(i32, f64)>)>,
    pub contribution_base: ContributionBase,
}

/// Builds one feature row per (district, sector) pair with default options.
pub fn build_feature_rows(district: &[SectorSeries], province: &[SectorSeries]) -> Result<Vec<FeatureRow>> {
    build_feature_rows_with(district, province, &FeatureOptions::default())
}

fn mean_of(values: &[f64]) -> f64 {
    stats::mean(values.iter().copied())
}

/// Builds one feature row per (district, sector) pair.
///
/// Districts come out in order of first appearance, sectors in canonical
/// order. Province statistics are computed once per sector.
pub fn build_feature_rows_with(
    district: &[SectorSeries],
    province: &[SectorSeries],
    options: &FeatureOptions,
) -> Result<Vec<FeatureRow>> {
    let province_id = match province.first() {
        Some(s) => s.region_id(),
        None => return Err(Error::EmptyInput),
    };
    if province.iter().any(|s| s.region_id() != province_id) {
        return Err(Error::AmbiguousProvince);
    }
    let mut province_by_sector: [Option<&SectorSeries>; 9] = [None; 9];
    for s in province {
        let slot = &mut province_by_sector[s.sector() as usize];
        if slot.is_some() {
            return Err(Error::DuplicateSeries {
                sector: s.sector().name(),
            });
        }
        *slot = Some(s);
    }
    let province_total = match &options.province_total {
        Some(total) => {
            check_yearly(total)?;
            total.clone()
        }
        None => total_series(province.iter().map(|s| s.values()))?,
    };

    // (growth mean, contribution mean) per province sector, computed lazily.
    let mut province_stats: [Option<(f64, f64)>; 9] = [None; 9];

    let mut regions: Vec<&str> = Vec::new();
    for s in district {
        if !regions.contains(&s.region_id()) {
            regions.push(s.region_id());
        }
    }

    let mut rows = Vec::with_capacity(district.len());
    for region in regions {
        let mut sectors: [Option<&SectorSeries>; 9] = [None; 9];
        for s in district.iter().filter(|s| s.region_id() == region) {
            let slot = &mut sectors[s.sector() as usize];
            if slot.is_some() {
                return Err(Error::DuplicateSeries {
                    sector: s.sector().name(),
                });
            }
            *slot = Some(s);
        }
        let region_total = match options.contribution_base {
            ContributionBase::Province => None,
            ContributionBase::Region => Some(match options.district_totals.iter().find(|(id, _)| id == region) {
                Some((_, total)) => {
                    check_yearly(total)?;
                    total.clone()
                }
                None => total_series(sectors.iter().flatten().map(|s| s.values()))?,
            }),
        };

        for series in sectors.iter().flatten() {
            let sector = series.sector();
            let reference =
                province_by_sector[sector as usize].ok_or(Error::MissingSector { sector: sector.name() })?;
            let (v3, v4) = match province_stats[sector as usize] {
                Some(stats) => stats,
                None => {
                    let g = mean_of(&growth_series(reference.values())?);
                    let c = mean_of(&contribution_series(reference.values(), &province_total)?);
                    province_stats[sector as usize] = Some((g, c));
                    (g, c)
                }
            };
            let v1 = mean_of(&growth_series(series.values())?);
            let base = region_total.as_deref().unwrap_or(&province_total);
            let v2 = mean_of(&contribution_series(series.values(), base)?);
            rows.push(FeatureRow::new(v1, v2, v3, v4).with_provenance(region, sector.name().to_string()));
        }
    }
    Ok(rows)
}

/// Per-feature standardization parameters.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationParams {
    pub enabled: bool,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl NormalizationParams {
    /// Identity transform.
    pub fn disabled() -> Self {
        NormalizationParams {
            enabled: false,
            mean: Vec::new(),
            sd: Vec::new(),
        }
    }

    /// Standardizes `x` in place. No-op when disabled.
    pub fn transform(&self, x: &mut [f64]) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: x.len(),
            });
        }
        for ((v, m), s) in x.iter_mut().zip(&self.mean).zip(&self.sd) {
            *v = (*v - m) / s;
        }
        Ok(())
    }
}

/// Fits per-feature mean and population standard deviation.
pub fn fit_normalizer(rows: &[impl AsRef<[f64]>]) -> Result<NormalizationParams> {
    if rows.len() < 2 {
        return Err(Error::TooShort { len: rows.len() });
    }
    let dim = rows[0].as_ref().len();
    if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.as_ref().len(),
        });
    }
    let mut mean = Vec::with_capacity(dim);
    let mut sd = Vec::with_capacity(dim);
    for k in 0..dim {
        let col = stats::column(rows, k);
        if col.iter().any(|v| !v.is_finite()) {
            let row = rows.iter().position(|r| !r.as_ref()[k].is_finite()).unwrap_or(0);
            return Err(Error::NonFinite { row });
        }
        let s = libm::sqrt(stats::variance(&col));
        if col.iter().all(|&v| v == col[0]) || !(s > 0.0) {
            return Err(Error::ZeroVariance { feature: k });
        }
        mean.push(stats::mean(col.iter().copied()));
        sd.push(s);
    }
    Ok(NormalizationParams {
        enabled: true,
        mean,
        sd,
    })
}

/// Applies `params` to every row, keeping provenance tags.
pub fn apply_normalizer(params: &NormalizationParams, rows: &[FeatureRow]) -> Result<Vec<FeatureRow>> {
    rows.iter()
        .map(|row| {
            let mut out = row.clone();
            params.transform(&mut out.values)?;
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn yearly(amounts: &[f64]) -> Vec<(i32, f64)> {
        amounts.iter().enumerate().map(|(i, &a)| (2010 + i as i32, a)).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn growth_examples() {
        assert_eq!(growth_series(&yearly(&[100.0, 100.0, 100.0])).unwrap(), vec![0.0, 0.0]);
        assert_eq!(growth_series(&yearly(&[100.0, 110.0])).unwrap(), vec![10.0]);
        let g = growth_series(&yearly(&[100.0, 110.0, 99.0])).unwrap();
        assert!(close(g[0], 10.0, 1e-12) && close(g[1], -10.0, 1e-12));
    }

    #[test]
    fn growth_errors() {
        assert_eq!(growth_series(&yearly(&[5.0])), Err(Error::TooShort { len: 1 }));
        assert_eq!(
            growth_series(&yearly(&[5.0, 0.0, 3.0])),
            Err(Error::ZeroBaseYear { year: 2011 })
        );
    }

    #[test]
    fn contribution_examples() {
        let t = yearly(&[100.0, 120.0]);
        assert_eq!(contribution_series(&t, &t).unwrap(), vec![100.0, 100.0]);
        assert_eq!(contribution_series(&yearly(&[0.0, 0.0]), &t).unwrap(), vec![0.0, 0.0]);
        assert_eq!(
            contribution_series(&yearly(&[25.0, 30.0]), &t).unwrap(),
            vec![25.0, 25.0]
        );
    }

    #[test]
    fn contribution_errors() {
        let t = yearly(&[100.0, 0.0]);
        assert_eq!(
            contribution_series(&yearly(&[1.0, 1.0]), &t),
            Err(Error::ZeroTotal { year: 2011 })
        );
        assert_eq!(
            contribution_series(&yearly(&[1.0]), &yearly(&[1.0, 2.0])),
            Err(Error::YearMismatch)
        );
        let shifted = vec![(2011, 1.0), (2012, 1.0)];
        assert_eq!(
            contribution_series(&shifted, &yearly(&[1.0, 2.0])),
            Err(Error::YearMismatch)
        );
    }

    #[test]
    fn series_validation() {
        let err = SectorSeries::new(
            "a",
            RegionKind::District,
            Sector::Mining,
            vec![(2011, 1.0), (2010, 2.0)],
        );
        assert_eq!(err, Err(Error::UnorderedYears { year: 2010 }));
        let err = SectorSeries::new("a", RegionKind::District, Sector::Mining, vec![(2010, -1.0)]);
        assert_eq!(err, Err(Error::InvalidAmount { year: 2010 }));
    }

    #[test]
    fn single_district_single_sector() {
        let d = SectorSeries::new(
            "d1",
            RegionKind::District,
            Sector::Construction,
            yearly(&[100.0, 110.0]),
        )
        .unwrap();
        let p = SectorSeries::new("p", RegionKind::Province, Sector::Construction, yearly(&[200.0, 210.0])).unwrap();
        let opts = FeatureOptions {
            province_total: Some(yearly(&[400.0, 420.0])),
            ..FeatureOptions::default()
        };
        let rows = build_feature_rows_with(&[d], &[p], &opts).unwrap();
        assert_eq!(rows.len(), 1);
        let v = rows[0].values;
        // (25 + 110/420*100) / 2
        let v2 = (25.0 + 11000.0 / 420.0) / 2.0;
        assert!(close(v[0], 10.0, 1e-12));
        assert!(close(v[1], v2, 1e-12) && close(v[1], 25.595, 1e-3));
        assert!(close(v[2], 5.0, 1e-12));
        assert!(close(v[3], 50.0, 1e-12));
        assert_eq!(rows[0].sector.as_deref(), Some("construction"));
        assert_eq!(rows[0].region_id.as_deref(), Some("d1"));
    }

    fn panel(region: &str, kind: RegionKind, scale: f64) -> Vec<SectorSeries> {
        Sector::ALL
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let base = scale * (10.0 + i as f64);
                let amounts = [base, base * 1.05, base * (1.1 + 0.01 * i as f64)];
                SectorSeries::new(region, kind, s, yearly(&amounts)).unwrap()
            })
            .collect()
    }

    #[test]
    fn district_equal_to_province_is_symmetric() {
        let province = panel("p", RegionKind::Province, 3.0);
        let district: Vec<_> = panel("d", RegionKind::District, 3.0);
        let rows = build_feature_rows(&district, &province).unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert!(close(r.values[0], r.values[2], 1e-12));
            assert!(close(r.values[1], r.values[3], 1e-12));
        }
    }

    #[test]
    fn fifteen_districts_give_135_rows() {
        let province = panel("central", RegionKind::Province, 40.0);
        let mut district = Vec::new();
        for d in 0..15 {
            district.extend(panel(&format!("d{d:02}"), RegionKind::District, 1.0 + d as f64));
        }
        let rows = build_feature_rows(&district, &province).unwrap();
        assert_eq!(rows.len(), 135);
        assert_eq!(rows[9].region_id.as_deref(), Some("d01"));
        assert_eq!(rows[9].sector.as_deref(), Some("agriculture"));
    }

    #[test]
    fn region_base_uses_own_total() {
        let province = panel("p", RegionKind::Province, 3.0);
        let district = panel("d", RegionKind::District, 1.0);
        let opts = FeatureOptions {
            contribution_base: ContributionBase::Region,
            ..FeatureOptions::default()
        };
        let rows = build_feature_rows_with(&district, &province, &opts).unwrap();
        let share: f64 = rows.iter().map(|r| r.values[1]).sum();
        assert!(close(share, 100.0, 1e-9));
    }

    #[test]
    fn missing_province_sector() {
        let province = vec![SectorSeries::new("p", RegionKind::Province, Sector::Mining, yearly(&[1.0, 2.0])).unwrap()];
        let district = vec![SectorSeries::new("d", RegionKind::District, Sector::Trade, yearly(&[1.0, 2.0])).unwrap()];
        assert_eq!(
            build_feature_rows(&district, &province),
            Err(Error::MissingSector { sector: "trade" })
        );
    }

    #[test]
    fn two_provinces_rejected() {
        let mut province = panel("p", RegionKind::Province, 1.0);
        province.extend(panel("q", RegionKind::Province, 1.0));
        let district = panel("d", RegionKind::District, 1.0);
        assert_eq!(build_feature_rows(&district, &province), Err(Error::AmbiguousProvince));
    }

    #[test]
    fn normalizer_examples() {
        let rows = [[0.0], [2.0]];
        let p = fit_normalizer(&rows).unwrap();
        let mut a = rows[0];
        let mut b = rows[1];
        p.transform(&mut a).unwrap();
        p.transform(&mut b).unwrap();
        assert_eq!((a[0], b[0]), (-1.0, 1.0));

        let same = [[0.1, 3.0], [0.1, 3.0], [0.1, 3.0]];
        assert_eq!(fit_normalizer(&same), Err(Error::ZeroVariance { feature: 0 }));
        assert_eq!(fit_normalizer(&[[1.0]]), Err(Error::TooShort { len: 1 }));

        let mut x = [4.0, 5.0];
        NormalizationParams::disabled().transform(&mut x).unwrap();
        assert_eq!(x, [4.0, 5.0]);
    }

    #[test]
    fn sector_names_parse() {
        for s in Sector::ALL {
            assert_eq!(Sector::parse(s.name()), Some(s));
        }
        assert_eq!(Sector::parse("Electricity-Gas and Water"), Some(Sector::Utilities));
        assert_eq!(Sector::parse("Mining and Quarrying"), Some(Sector::Mining));
        assert_eq!(Sector::parse("Building"), Some(Sector::Construction));
        assert_eq!(Sector::parse("fishing"), None);
    }
}
