//! Gaussian naive Bayes.
//!
//! Each feature is modelled as an independent normal distribution per class.
//! Scores are computed in log space and turned into posteriors with a
//! softmax, which is prior × likelihood / evidence without the underflow.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::stats;
use crate::{Error, Result};

/// Default variance floor, relative to the largest feature variance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// A fitted classifier. All per-label vectors follow the order of `labels`,
/// which is ascending.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NbModel {
    pub labels: Vec<u32>,
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    pub epsilon: f64,
}

/// Winning label plus the posterior of every model label.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: u32,
    /// Aligned with [`NbModel::labels`].
    pub posteriors: Vec<f64>,
}

impl NbModel {
    pub fn dimension(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    fn index_of(&self, label: u32) -> Result<usize> {
        self.labels
            .binary_search(&label)
            .map_err(|_| Error::UnknownLabel(label))
    }

    /// Checks the structural invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if self.priors.len() != n || self.means.len() != n || self.variances.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: self.priors.len(),
            });
        }
        if self.labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("labels must be strictly increasing"));
        }
        if self.priors.iter().any(|&p| !(p > 0.0)) || (self.priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig("priors must be positive and sum to 1"));
        }
        let dim = self.dimension();
        for (m, v) in self.means.iter().zip(&self.variances) {
            if m.len() != dim || v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.len().min(v.len()),
                });
            }
            if v.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::InvalidConfig("variances must be positive"));
            }
        }
        Ok(())
    }
}

/// Fits priors, per-class means and population variances.
///
/// Variances are floored at `epsilon` times the largest overall feature
/// variance (or `epsilon` itself when every feature is constant), so
/// singleton classes still give a proper density.
pub fn fit_nb(rows: &[impl AsRef<[f64]>], labels: &[u32], epsilon: f64) -> Result<NbModel> {
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be positive"));
    }
    let dim = rows[0].as_ref().len();
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

    let max_var = (0..dim)
        .map(|k| stats::variance(&stats::column(rows, k)))
        .fold(0.0f64, f64::max);
    let floor = epsilon * if max_var > 0.0 { max_var } else { 1.0 };

    let mut groups: BTreeMap<u32, Vec<&[f64]>> = BTreeMap::new();
    for (r, &l) in rows.iter().zip(labels) {
        groups.entry(l).or_default().push(r.as_ref());
    }

    let n = rows.len() as f64;
    let mut model = NbModel {
        labels: Vec::with_capacity(groups.len()),
        priors: Vec::with_capacity(groups.len()),
        means: Vec::with_capacity(groups.len()),
        variances: Vec::with_capacity(groups.len()),
        epsilon,
    };
    for (label, members) in groups {
        let mut means = Vec::with_capacity(dim);
        let mut vars = Vec::with_capacity(dim);
        for k in 0..dim {
            let col = stats::column(&members, k);
            means.push(stats::mean(col.iter().copied()));
            vars.push(stats::variance(&col).max(floor));
        }
        model.labels.push(label);
        model.priors.push(members.len() as f64 / n);
        model.means.push(means);
        model.variances.push(vars);
    }
    Ok(model)
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn log_density(x: &[f64], means: &[f64], vars: &[f64]) -> f64 {
    x.iter()
        .zip(means)
        .zip(vars)
        .map(|((&xk, &m), &v)| -0.5 * (LN_2PI + libm::log(v)) - (xk - m) * (xk - m) / (2.0 * v))
        .sum()
}

/// `ln P(x | label)` under the independent-Gaussian model.
pub fn log_likelihood(model: &NbModel, x: &[f64], label: u32) -> Result<f64> {
    let i = model.index_of(label)?;
    if x.len() != model.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            found: x.len(),
        });
    }
    Ok(log_density(x, &model.means[i], &model.variances[i]))
}

/// Maximum a-posteriori label; ties go to the lowest label id.
pub fn predict(model: &NbModel, x: &[f64]) -> Result<Prediction> {
    if x.len() != model.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            found: x.len(),
        });
    }
    let scores: Vec<f64> = (0..model.labels.len())
        .map(|i| libm::log(model.priors[i]) + log_density(x, &model.means[i], &model.variances[i]))
        .collect();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let top = scores[best];
    let mut posteriors: Vec<f64> = scores.iter().map(|&s| libm::exp(s - top)).collect();
    let z: f64 = posteriors.iter().sum();
    for p in &mut posteriors {
        *p /= z;
    }
    Ok(Prediction {
        label: model.labels[best],
        posteriors,
    })
}

/// Predicts every row, preserving order.
pub fn predict_all(model: &NbModel, rows: &[impl AsRef<[f64]>]) -> Result<Vec<u32>> {
    rows.iter()
        .map(|r| predict(model, r.as_ref()).map(|p| p.label))
        .collect()
}
