//! Population statistics shared by the normalizer and the classifier.

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Two-pass population variance (divides by n).
pub(crate) fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values.iter().copied());
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

pub(crate) fn column(rows: &[impl AsRef<[f64]>], k: usize) -> alloc::vec::Vec<f64> {
    rows.iter().map(|r| r.as_ref()[k]).collect()
}
