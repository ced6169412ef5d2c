//! Label agreement: raw identity matches, permutation-aligned matches and
//! confusion matrices.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Alignment is exhaustive, so the label alphabet is capped.
pub const MAX_ALIGN_LABELS: usize = 8;

/// A non-negative fraction kept exactly.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn to_f64(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// Percentage with two decimals, e.g. `29.63`.
    pub fn percent(self) -> String {
        if self.den == 0 {
            return String::from("0.00");
        }
        // Round half up on the exact value, in hundredths of a percent.
        let scaled = (u128::from(self.num) * 20_000 / u128::from(self.den)).div_ceil(2);
        alloc::format!("{}.{:02}", scaled / 100, scaled % 100)
    }

    /// Reduced to lowest terms.
    pub fn reduced(self) -> Self {
        let g = gcd(self.num, self.den).max(1);
        Ratio::new(self.num / g, self.den / g)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        let lhs = u128::from(self.num) * u128::from(other.den);
        let rhs = u128::from(other.num) * u128::from(self.den);
        Some(lhs.cmp(&rhs))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Identity agreement between two label lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Agreement {
    pub ratio: Ratio,
    /// 0-based positions where the lists agree.
    pub matching: Vec<usize>,
}

fn check_lengths(a: &[u32], b: &[u32]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Fraction of positions where `a[i] == b[i]`.
pub fn raw_agreement(a: &[u32], b: &[u32]) -> Result<Agreement> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let matching: Vec<usize> = (0..a.len()).filter(|&i| a[i] == b[i]).collect();
    Ok(Agreement {
        ratio: Ratio::new(matching.len() as u64, a.len() as u64),
        matching,
    })
}

/// Best agreement after relabeling `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    pub ratio: Ratio,
    /// `(b label, label it is mapped to)`, sorted by `b` label.
    pub mapping: Vec<(u32, u32)>,
}

impl Alignment {
    pub fn apply(&self, label: u32) -> u32 {
        self.mapping
            .iter()
            .find(|(from, _)| *from == label)
            .map_or(label, |&(_, to)| to)
    }
}

fn distinct(labels: &[u32]) -> Vec<u32> {
    labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

struct Search<'a> {
    b_labels: &'a [u32],
    a_labels: &'a [u32],
    targets: &'a [u32],
    // pair_counts[i][j]: rows with b = b_labels[i] and a = a_labels[j]
    pair_counts: Vec<Vec<u64>>,
    used: Vec<bool>,
    current: Vec<u32>,
    score: u64,
    best: Option<(u64, Vec<u32>)>,
}

impl Search<'_> {
    fn a_index(&self, target: u32) -> Option<usize> {
        self.a_labels.binary_search(&target).ok()
    }

    // Depth-first over b labels in ascending order, candidate targets in
    // ascending order, so the first maximum found is lexicographically
    // smallest. Targets outside `a` never score; only the smallest unused one
    // is tried, as any other would give the same score and a larger mapping.
    fn run(&mut self, depth: usize) {
        if depth == self.b_labels.len() {
            if self.best.as_ref().is_none_or(|(s, _)| self.score > *s) {
                self.best = Some((self.score, self.current.clone()));
            }
            return;
        }
        let mut tried_free = false;
        for t in 0..self.targets.len() {
            if self.used[t] {
                continue;
            }
            let target = self.targets[t];
            let gain = match self.a_index(target) {
                Some(j) => self.pair_counts[depth][j],
                None if tried_free => continue,
                None => {
                    tried_free = true;
                    0
                }
            };
            self.used[t] = true;
            self.current.push(target);
            self.score += gain;
            self.run(depth + 1);
            self.score -= gain;
            self.current.pop();
            self.used[t] = false;
        }
    }
}

/// Maximum identity agreement between `a` and `π(b)` over all injective
/// relabelings `π` of `b`'s labels into `{1..=max(4, k)}` (plus the labels
/// already used by either list). Ties pick the lexicographically smallest
/// mapping.
pub fn aligned_agreement(a: &[u32], b: &[u32]) -> Result<Alignment> {
    check_lengths(a, b)?;
    let a_labels = distinct(a);
    let b_labels = distinct(b);
    let most = a_labels.len().max(b_labels.len());
    if most > MAX_ALIGN_LABELS {
        return Err(Error::TooManyLabels {
            found: most,
            max: MAX_ALIGN_LABELS,
        });
    }
    let upper = 4.max(most) as u32;
    let targets: Vec<u32> = (1..=upper)
        .chain(a_labels.iter().copied())
        .chain(b_labels.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut pair_counts = vec![vec![0u64; a_labels.len()]; b_labels.len()];
    for (&x, &y) in a.iter().zip(b) {
        let i = b_labels.binary_search(&y).unwrap_or_default();
        let j = a_labels.binary_search(&x).unwrap_or_default();
        pair_counts[i][j] += 1;
    }

    let mut search = Search {
        b_labels: &b_labels,
        a_labels: &a_labels,
        targets: &targets,
        pair_counts,
        used: vec![false; targets.len()],
        current: Vec::with_capacity(b_labels.len()),
        score: 0,
        best: None,
    };
    search.run(0);
    let (score, best) = search.best.unwrap_or_default();
    Ok(Alignment {
        ratio: Ratio::new(score, a.len() as u64),
        mapping: b_labels.iter().copied().zip(best).collect(),
    })
}

/// Counts of `(a, b)` label pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    /// Row and column labels, ascending; always includes 1 to 4.
    pub labels: Vec<u32>,
    /// `counts[i][j]`: positions with `a = labels[i]` and `b = labels[j]`.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn get(&self, a: u32, b: u32) -> u64 {
        match (self.labels.binary_search(&a), self.labels.binary_search(&b)) {
            (Ok(i), Ok(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.labels.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.row_sums().iter().sum()
    }
}

pub fn confusion_matrix(a: &[u32], b: &[u32]) -> Result<ConfusionMatrix> {
    check_lengths(a, b)?;
    let labels: Vec<u32> = (1..=4)
        .chain(a.iter().copied())
        .chain(b.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = vec![vec![0u64; labels.len()]; labels.len()];
    for (x, y) in a.iter().zip(b) {
        let i = labels.binary_search(x).unwrap_or_default();
        let j = labels.binary_search(y).unwrap_or_default();
        counts[i][j] += 1;
    }
    Ok(ConfusionMatrix { labels, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rendering() {
        assert_eq!(Ratio::new(16, 54).percent(), "29.63");
        assert_eq!(Ratio::new(1, 1).percent(), "100.00");
        assert_eq!(Ratio::new(0, 7).percent(), "0.00");
        assert_eq!(Ratio::new(1, 8).percent(), "12.50");
        assert_eq!(Ratio::new(53, 54).percent(), "98.15");
        assert_eq!(Ratio::new(16, 54).reduced(), Ratio::new(8, 27));
        assert!(Ratio::new(1, 3) < Ratio::new(1, 2));
    }

    #[test]
    fn raw_examples() {
        let a = [1, 2, 3, 4];
        let r = raw_agreement(&a, &a).unwrap();
        assert_eq!(r.ratio, Ratio::new(4, 4));
        assert_eq!(r.matching, vec![0, 1, 2, 3]);
        let r = raw_agreement(&[1, 1, 2], &[3, 4, 3]).unwrap();
        assert_eq!(r.ratio.num, 0);
        assert_eq!(raw_agreement(&[], &[]), Err(Error::EmptyInput));
        assert_eq!(
            raw_agreement(&[1], &[1, 2]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn aligned_swap() {
        let al = aligned_agreement(&[1, 1, 2, 2], &[2, 2, 1, 1]).unwrap();
        assert_eq!(al.ratio, Ratio::new(4, 4));
        assert_eq!(al.mapping, vec![(1, 2), (2, 1)]);
        assert_eq!(al.apply(1), 2);
    }

    #[test]
    fn aligned_identity() {
        let a = [3, 1, 4, 1, 2];
        let al = aligned_agreement(&a, &a).unwrap();
        assert_eq!(al.ratio, Ratio::new(5, 5));
        assert_eq!(al.mapping, vec![(1, 1), (2, 2), (3, 3), (4, 4)]);
    }

    #[test]
    fn aligned_ties_pick_smallest_mapping() {
        // b's label 9 never matches anything useful: it takes the smallest
        // free target.
        let al = aligned_agreement(&[1, 2, 3], &[1, 9, 9]).unwrap();
        assert_eq!(al.ratio, Ratio::new(2, 3));
        assert_eq!(al.mapping, vec![(1, 1), (9, 2)]);
    }

    #[test]
    fn too_many_labels() {
        let a: Vec<u32> = (0..9).collect();
        assert_eq!(
            aligned_agreement(&a, &a),
            Err(Error::TooManyLabels { found: 9, max: 8 })
        );
        let a: Vec<u32> = (0..8).collect();
        assert_eq!(aligned_agreement(&a, &a).unwrap().ratio, Ratio::new(8, 8));
    }

    #[test]
    fn confusion_examples() {
        let m = confusion_matrix(&[1, 1, 2, 2, 2], &[1, 1, 2, 2, 2]).unwrap();
        assert_eq!(m.labels, vec![1, 2, 3, 4]);
        assert_eq!(m.get(1, 1), 2);
        assert_eq!(m.get(2, 2), 3);
        assert_eq!(m.total(), 5);
        assert_eq!(m.get(1, 2) + m.get(2, 1), 0);
        let e = confusion_matrix(&[], &[]).unwrap();
        assert_eq!(e.counts, vec![vec![0; 4]; 4]);
        let z = confusion_matrix(&[0, 5], &[5, 5]).unwrap();
        assert_eq!(z.labels, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(z.row_sums(), vec![1, 0, 0, 0, 0, 1]);
        assert_eq!(z.col_sums(), vec![0, 0, 0, 0, 0, 2]);
    }
}
