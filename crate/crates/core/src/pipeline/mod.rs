//! SOM pseudo-labeling followed by naive Bayes, and the evaluation of its
//! output against Klassen quadrants.
//!
//! The map is trained on the training rows; each row's best-matching unit
//! becomes its class (`unit + 1`, so classes read 1 to 4 on a 2×2 map). The
//! classifier is then fitted to those classes and applied to the test rows.

mod agreement;
mod report;

use alloc::vec::Vec;

pub use agreement::{
    aligned_agreement, confusion_matrix, raw_agreement, Agreement, Alignment, ConfusionMatrix, Ratio, MAX_ALIGN_LABELS,
};
pub use report::{compare_with_klassen, evaluate, EvaluationReport};

use crate::bayes::{self, NbModel};
use crate::dataset::{self, FeatureRow, NormalizationParams, FEATURES};
use crate::som::{self, SomConfig, SomModel};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub som: SomConfig,
    pub nb_epsilon: f64,
    /// Standardize features (fitted on the training rows) before training.
    pub normalize: bool,
    /// Train on the second set and test on the first.
    pub swap_roles: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            som: SomConfig::default(),
            nb_epsilon: bayes::DEFAULT_EPSILON,
            normalize: false,
            swap_roles: false,
        }
    }
}

/// Non-fatal conditions met during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    /// No training row picked this unit as BMU; its class has no prior.
    EmptySomCluster { unit: usize },
    /// A class present in training was never predicted on the test rows.
    UnusedPredictedLabel { label: u32 },
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::EmptySomCluster { unit } => {
                write!(
                    f,
                    "EmptySomCluster: SOM unit {unit} (class {}) received no training rows",
                    unit + 1
                )
            }
            Warning::UnusedPredictedLabel { label } => {
                write!(
                    f,
                    "UnusedPredictedLabel: class {label} was never predicted on the test rows"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub som: SomModel,
    pub nb: NbModel,
    /// Pseudo-label (class) of each training row.
    pub train_labels: Vec<u32>,
    /// Classifier output for each test row.
    pub predictions: Vec<u32>,
    /// Classifier output on the training rows against their pseudo-labels.
    pub train_fidelity: Ratio,
    /// Rows per SOM unit on the training set.
    pub hits: Vec<usize>,
    pub warnings: Vec<Warning>,
}

/// Class id of a SOM unit.
pub fn class_of_unit(unit: usize) -> u32 {
    unit as u32 + 1
}

/// Runs the two-stage pipeline. With `swap_roles`, `test` is used for
/// training and `train` for testing.
pub fn run_pipeline(train: &[FeatureRow], test: &[FeatureRow], config: &PipelineConfig) -> Result<PipelineOutput> {
    let (train, test) = if config.swap_roles {
        (test, train)
    } else {
        (train, test)
    };
    if train.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, r) in train.iter().chain(test).enumerate() {
        if !r.is_finite() {
            let row = if i < train.len() { i } else { i - train.len() };
            return Err(Error::NonFinite { row });
        }
    }

    let normalization = if config.normalize {
        dataset::fit_normalizer(train)?
    } else {
        NormalizationParams::disabled()
    };
    let train_x = dataset::apply_normalizer(&normalization, train)?;
    let test_x = dataset::apply_normalizer(&normalization, test)?;

    let mut som_model = som::train_som(&train_x, &config.som)?;
    som_model.normalization = normalization;

    let units = som::assign_labels(&som_model, &train_x)?;
    let hits = som::hit_counts(&units, som_model.units());
    let train_labels: Vec<u32> = units.iter().map(|&u| class_of_unit(u)).collect();

    let nb = bayes::fit_nb(&train_x, &train_labels, config.nb_epsilon)?;
    let refit = bayes::predict_all(&nb, &train_x)?;
    let train_fidelity = raw_agreement(&refit, &train_labels)?.ratio;
    let predictions = bayes::predict_all(&nb, &test_x)?;

    let mut warnings: Vec<Warning> = hits
        .iter()
        .enumerate()
        .filter(|(_, &n)| n == 0)
        .map(|(unit, _)| Warning::EmptySomCluster { unit })
        .collect();
    if !test.is_empty() {
        warnings.extend(
            nb.labels
                .iter()
                .filter(|l| !predictions.contains(l))
                .map(|&label| Warning::UnusedPredictedLabel { label }),
        );
    }

    Ok(PipelineOutput {
        som: som_model,
        nb,
        train_labels,
        predictions,
        train_fidelity,
        hits,
        warnings,
    })
}

/// Feature dimension the pipeline expects.
pub const DIMENSION: usize = FEATURES;
