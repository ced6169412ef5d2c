use alloc::vec::Vec;

use super::agreement::{aligned_agreement, confusion_matrix, raw_agreement, ConfusionMatrix, Ratio};
use crate::dataset::FeatureRow;
use crate::klassen;
use crate::{Error, Result};

/// Comparison of a predicted labeling against a reference labeling.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationReport {
    pub rows: usize,
    pub raw: Ratio,
    /// 1-based row numbers where reference and prediction agree.
    pub matching_rows: Vec<usize>,
    pub aligned: Ratio,
    /// `(predicted label, reference label)` pairs of the best relabeling.
    pub mapping: Vec<(u32, u32)>,
    /// Rows are reference labels, columns predicted labels.
    pub confusion: ConfusionMatrix,
    pub reference_counts: Vec<(u32, u64)>,
    pub predicted_counts: Vec<(u32, u64)>,
    /// Labels of the confusion matrix never used by the reference.
    pub unused_reference_labels: Vec<u32>,
    /// Labels of the confusion matrix never predicted.
    pub unused_predicted_labels: Vec<u32>,
}

/// Compares `predicted` against `reference` position by position.
pub fn evaluate(reference: &[u32], predicted: &[u32]) -> Result<EvaluationReport> {
    let raw = raw_agreement(reference, predicted)?;
    let aligned = aligned_agreement(reference, predicted)?;
    let confusion = confusion_matrix(reference, predicted)?;
    let reference_counts: Vec<(u32, u64)> = confusion.labels.iter().copied().zip(confusion.row_sums()).collect();
    let predicted_counts: Vec<(u32, u64)> = confusion.labels.iter().copied().zip(confusion.col_sums()).collect();
    let unused = |counts: &[(u32, u64)]| counts.iter().filter(|(_, n)| *n == 0).map(|(l, _)| *l).collect();
    Ok(EvaluationReport {
        rows: reference.len(),
        raw: raw.ratio,
        matching_rows: raw.matching.iter().map(|i| i + 1).collect(),
        aligned: aligned.ratio,
        mapping: aligned.mapping,
        unused_reference_labels: unused(&reference_counts),
        unused_predicted_labels: unused(&predicted_counts),
        confusion,
        reference_counts,
        predicted_counts,
    })
}

/// Recomputes Klassen quadrants for `rows` and evaluates `predictions`
/// against them.
pub fn compare_with_klassen(rows: &[FeatureRow], predictions: &[u32]) -> Result<EvaluationReport> {
    if rows.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: predictions.len(),
        });
    }
    let reference: Vec<u32> = klassen::classify_all(rows)?
        .into_iter()
        .map(|q| u32::from(q.value()))
        .collect();
    evaluate(&reference, predictions)
}
