//! Kohonen self-organizing map.
//!
//! Online training: every presentation finds the best-matching unit (BMU) and
//! pulls all prototypes toward the input, weighted by a Gaussian kernel over
//! grid distance. Learning rate and kernel width shrink linearly over the
//! whole run. All randomness comes from a ChaCha8 stream seeded by
//! [`SomConfig::seed`], so training is reproducible bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::NormalizationParams;
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Topology {
    Hexagonal,
    Rectangular,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub topology: Topology,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, topology: Topology) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("grid needs at least one row and one column"));
        }
        Ok(GridSpec { rows, cols, topology })
    }

    pub fn units(&self) -> usize {
        self.rows * self.cols
    }

    /// Largest grid distance between two units.
    pub fn diameter(&self) -> f64 {
        let pos = grid_positions(self);
        let mut best = 0.0f64;
        for (i, a) in pos.iter().enumerate() {
            for b in &pos[i + 1..] {
                best = best.max(libm::sqrt(sq_dist2(a, b)));
            }
        }
        best
    }
}

impl Default for GridSpec {
    /// Two by two hexagonal grid.
    fn default() -> Self {
        GridSpec {
            rows: 2,
            cols: 2,
            topology: Topology::Hexagonal,
        }
    }
}

/// Unit coordinates on the map; unit `u = r * cols + c`.
///
/// Hexagonal grids shift odd rows by half a unit and space rows by `√3/2`,
/// so every pair of adjacent units sits at distance 1.
pub fn grid_positions(spec: &GridSpec) -> Vec<[f64; 2]> {
    let row_step = match spec.topology {
        Topology::Hexagonal => libm::sqrt(3.0) / 2.0,
        Topology::Rectangular => 1.0,
    };
    let mut out = Vec::with_capacity(spec.units());
    for r in 0..spec.rows {
        let shift = match spec.topology {
            Topology::Hexagonal if r % 2 == 1 => 0.5,
            _ => 0.0,
        };
        for c in 0..spec.cols {
            out.push([c as f64 + shift, r as f64 * row_step]);
        }
    }
    out
}

/// Training hyper-parameters.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SomConfig {
    pub grid: GridSpec,
    /// Full passes over the training rows.
    pub epochs: u32,
    pub alpha0: f64,
    pub alpha_end: f64,
    pub sigma0: f64,
    pub sigma_min: f64,
    pub seed: u64,
}

pub const DEFAULT_EPOCHS: u32 = 1000;
pub const DEFAULT_ALPHA0: f64 = 0.5;
pub const DEFAULT_ALPHA_END: f64 = 0.01;
pub const DEFAULT_SIGMA_MIN: f64 = 0.3;

impl SomConfig {
    /// Default schedule for `grid`: α from 0.5 to 0.01 and σ from half the
    /// grid diameter down to 0.3.
    pub fn new(grid: GridSpec) -> Self {
        let sigma0 = (grid.diameter() / 2.0).max(DEFAULT_SIGMA_MIN);
        SomConfig {
            grid,
            epochs: DEFAULT_EPOCHS,
            alpha0: DEFAULT_ALPHA0,
            alpha_end: DEFAULT_ALPHA_END,
            sigma0,
            sigma_min: DEFAULT_SIGMA_MIN,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: u32) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.units() == 0 {
            return Err(Error::InvalidConfig("grid has no units"));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive"));
        }
        if !(0.0 < self.alpha_end && self.alpha_end <= self.alpha0 && self.alpha0 <= 1.0) {
            return Err(Error::InvalidConfig("need 0 < alpha_end <= alpha0 <= 1"));
        }
        if !(0.0 < self.sigma_min && self.sigma_min <= self.sigma0 && self.sigma0.is_finite()) {
            return Err(Error::InvalidConfig("need 0 < sigma_min <= sigma0"));
        }
        Ok(())
    }

    /// Learning rate and kernel width at presentation `t` of `total`.
    pub fn schedule(&self, t: u64, total: u64) -> (f64, f64) {
        let frac = if total > 1 { t as f64 / (total - 1) as f64 } else { 0.0 };
        (
            self.alpha0 + (self.alpha_end - self.alpha0) * frac,
            self.sigma0 + (self.sigma_min - self.sigma0) * frac,
        )
    }
}

impl Default for SomConfig {
    fn default() -> Self {
        SomConfig::new(GridSpec::default())
    }
}

/// A map: unit positions and prototype vectors.
///
/// Prototypes live in the feature space the map was trained on. When the
/// training rows were standardized, `normalization` records the transform
/// that inputs must go through before [`find_bmu`] or [`assign_labels`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SomModel {
    pub config: SomConfig,
    pub positions: Vec<[f64; 2]>,
    pub prototypes: Vec<Vec<f64>>,
    pub normalization: NormalizationParams,
}

impl SomModel {
    pub fn units(&self) -> usize {
        self.prototypes.len()
    }

    pub fn dimension(&self) -> usize {
        self.prototypes.first().map_or(0, Vec::len)
    }

    /// Checks the structural invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let units = self.config.grid.units();
        if self.positions.len() != units || self.prototypes.len() != units {
            return Err(Error::LengthMismatch {
                left: units,
                right: self.prototypes.len(),
            });
        }
        let dim = self.dimension();
        for p in &self.prototypes {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn sq_dist2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    sq_dist(a, b)
}

/// Index and Euclidean distance of the prototype closest to `x`. Ties go to
/// the lowest index.
pub fn find_bmu(x: &[f64], prototypes: &[impl AsRef<[f64]>]) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, m) in prototypes.iter().enumerate() {
        let m = m.as_ref();
        if m.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                found: x.len(),
            });
        }
        let d = sq_dist(x, m);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    let (i, d) = best.ok_or(Error::EmptyInput)?;
    Ok((i, libm::sqrt(d)))
}

/// Gaussian neighborhood weight `exp(-|r_b - r_i|² / 2σ²)` between units
/// `b` and `i` on the grid.
pub fn neighborhood(b: usize, i: usize, sigma: f64, positions: &[[f64; 2]]) -> f64 {
    let d2 = sq_dist2(&positions[b], &positions[i]);
    libm::exp(-d2 / (2.0 * sigma * sigma))
}

/// `m + α·h·(x − m)`.
pub fn update_prototype(m: &[f64], x: &[f64], alpha: f64, h: f64) -> Result<Vec<f64>> {
    let mut out = m.to_vec();
    update_in_place(&mut out, x, alpha * h)?;
    Ok(out)
}

fn update_in_place(m: &mut [f64], x: &[f64], step: f64) -> Result<()> {
    if m.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: x.len(),
        });
    }
    if !(0.0..=1.0).contains(&step) {
        return Err(Error::InvalidConfig("alpha * h must lie in [0, 1]"));
    }
    for (mk, xk) in m.iter_mut().zip(x) {
        *mk += step * (xk - *mk);
    }
    Ok(())
}

fn check_rows(rows: &[impl AsRef<[f64]>]) -> Result<usize> {
    let first = rows.first().ok_or(Error::EmptyInput)?;
    let dim = first.as_ref().len();
    if dim == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i });
        }
    }
    Ok(dim)
}

fn init_model(rows: &[impl AsRef<[f64]>], config: &SomConfig, rng: &mut ChaCha8Rng) -> Result<SomModel> {
    config.validate()?;
    let dim = check_rows(rows)?;
    let mut lo = rows[0].as_ref().to_vec();
    let mut hi = lo.clone();
    for r in rows {
        for (k, &v) in r.as_ref().iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let prototypes = (0..config.grid.units())
        .map(|_| {
            (0..dim)
                .map(|k| {
                    if lo[k] < hi[k] {
                        rng.gen_range(lo[k]..hi[k])
                    } else {
                        lo[k]
                    }
                })
                .collect()
        })
        .collect();
    Ok(SomModel {
        config: config.clone(),
        positions: grid_positions(&config.grid),
        prototypes,
        normalization: NormalizationParams::disabled(),
    })
}

/// The untrained map: prototypes drawn uniformly inside the per-feature
/// range of `rows`. Identical to the starting point of [`train_som`].
pub fn initialize_som(rows: &[impl AsRef<[f64]>], config: &SomConfig) -> Result<SomModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    init_model(rows, config, &mut rng)
}

/// Trains a map on `rows`.
///
/// Each epoch visits every row once in a freshly shuffled order; each
/// presentation updates all units.
pub fn train_som(rows: &[impl AsRef<[f64]>], config: &SomConfig) -> Result<SomModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = init_model(rows, config, &mut rng)?;

    let total = u64::from(config.epochs) * rows.len() as u64;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut t = 0u64;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let x = rows[idx].as_ref();
            let (alpha, sigma) = config.schedule(t, total);
            let (b, _) = find_bmu(x, &model.prototypes)?;
            for (i, m) in model.prototypes.iter_mut().enumerate() {
                let h = neighborhood(b, i, sigma, &model.positions);
                update_in_place(m, x, alpha * h)?;
            }
            t += 1;
        }
    }
    Ok(model)
}

/// BMU index of every row (0-based).
pub fn assign_labels(model: &SomModel, rows: &[impl AsRef<[f64]>]) -> Result<Vec<usize>> {
    rows.iter()
        .map(|r| find_bmu(r.as_ref(), &model.prototypes).map(|(b, _)| b))
        .collect()
}

/// Number of rows assigned to each unit.
pub fn hit_counts(labels: &[usize], units: usize) -> Vec<usize> {
    let mut counts = vec![0; units];
    for &l in labels {
        if l < units {
            counts[l] += 1;
        }
    }
    counts
}

/// Mean squared distance from each row to its BMU prototype.
pub fn quantization_error(model: &SomModel, rows: &[impl AsRef<[f64]>]) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sum = 0.0;
    for r in rows {
        let (_, d) = find_bmu(r.as_ref(), &model.prototypes)?;
        sum += d * d;
    }
    Ok(sum / rows.len() as f64)
}

/// Kernel-weighted energy `Σ_i Σ_j h(b_i, j) |x_i − m_j|²` at a fixed σ.
pub fn som_energy(model: &SomModel, rows: &[impl AsRef<[f64]>], sigma: f64) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig("sigma must be positive"));
    }
    let mut energy = 0.0;
    for r in rows {
        let x = r.as_ref();
        let (b, _) = find_bmu(x, &model.prototypes)?;
        for (j, m) in model.prototypes.iter().enumerate() {
            energy += neighborhood(b, j, sigma, &model.positions) * sq_dist(x, m);
        }
    }
    Ok(energy)
}
