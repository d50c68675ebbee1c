//! Nominal Krippendorff's alpha from the coincidence matrix of pairable values.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{EmotionLabel, PairKind, ParallelRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error("insufficient data: need at least two annotators labelling at least one shared item")]
    InsufficientData,
    #[error("alpha undefined: all pairable labels fall in one category (expected disagreement is zero)")]
    UndefinedAlpha,
}

/// Labels keyed by (annotator, item). Missing cells are simply absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaInput<L = EmotionLabel> {
    labels: BTreeMap<(String, String), L>,
}

impl<L> Default for AlphaInput<L> {
    fn default() -> Self {
        AlphaInput {
            labels: BTreeMap::new(),
        }
    }
}

impl<L: Ord + Clone> AlphaInput<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, annotator: impl Into<String>, item: impl Into<String>, label: L) {
        self.labels.insert((annotator.into(), item.into()), label);
    }

    pub fn annotators(&self) -> BTreeSet<&str> {
        self.labels.keys().map(|(a, _)| a.as_str()).collect()
    }

    pub fn items(&self) -> BTreeSet<&str> {
        self.labels.keys().map(|(_, i)| i.as_str()).collect()
    }

    /// Values per item, in item order.
    pub fn units(&self) -> Vec<Vec<L>> {
        let mut by_item: BTreeMap<&str, Vec<L>> = BTreeMap::new();
        for ((_, item), label) in &self.labels {
            by_item.entry(item.as_str()).or_default().push(label.clone());
        }
        by_item.into_values().collect()
    }
}

impl AlphaInput<EmotionLabel> {
    /// Annotator labels of every record of the given kind.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ParallelRecord>, kind: PairKind) -> Self {
        let mut input = AlphaInput::new();
        for r in records.into_iter().filter(|r| r.kind == kind) {
            for (annotator, label) in &r.annotator_labels {
                input.insert(annotator.clone(), r.record_id.clone(), *label);
            }
        }
        input
    }
}

pub fn krippendorff_alpha<L: Ord + Clone>(input: &AlphaInput<L>) -> Result<f64, AlphaError> {
    if input.annotators().len() < 2 {
        return Err(AlphaError::InsufficientData);
    }
    nominal_alpha(&input.units())
}

/// Nominal alpha over units (one list of values per item). Units with fewer
/// than two values are not pairable and are ignored.
pub fn nominal_alpha<L: Ord>(units: &[Vec<L>]) -> Result<f64, AlphaError> {
    let categories: BTreeMap<&L, usize> = {
        let set: BTreeSet<&L> = units.iter().filter(|u| u.len() >= 2).flatten().collect();
        set.into_iter().enumerate().map(|(i, l)| (l, i)).collect()
    };
    let k = categories.len();
    let mut coincidence = vec![vec![0.0f64; k]; k];
    for unit in units.iter().filter(|u| u.len() >= 2) {
        let m = unit.len() as f64;
        let mut counts = vec![0.0f64; k];
        for v in unit {
            counts[categories[v]] += 1.0;
        }
        for c in 0..k {
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * (counts[c] - 1.0)
                } else {
                    counts[c] * counts[d]
                };
                coincidence[c][d] += pairs / (m - 1.0);
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    if n == 0.0 {
        return Err(AlphaError::InsufficientData);
    }
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            if c != d {
                observed += coincidence[c][d];
                expected += marginals[c] * marginals[d];
            }
        }
    }
    if expected == 0.0 {
        return Err(AlphaError::UndefinedAlpha);
    }
    Ok(1.0 - (n - 1.0) * observed / expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement_is_exactly_one() {
        let mut input = AlphaInput::new();
        for item in 0..10 {
            let label = if item % 2 == 0 { "x" } else { "y" };
            for a in ["a1", "a2", "a3"] {
                input.insert(a, format!("i{item}"), label);
            }
        }
        assert_eq!(krippendorff_alpha(&input), Ok(1.0));
    }

    #[test]
    fn single_annotator_is_insufficient() {
        let mut input = AlphaInput::new();
        input.insert("a1", "i1", 'A');
        input.insert("a1", "i2", 'B');
        assert_eq!(krippendorff_alpha(&input), Err(AlphaError::InsufficientData));
    }

    #[test]
    fn no_shared_items_is_insufficient() {
        let mut input = AlphaInput::new();
        input.insert("a1", "i1", 'A');
        input.insert("a2", "i2", 'B');
        assert_eq!(krippendorff_alpha(&input), Err(AlphaError::InsufficientData));
    }

    #[test]
    fn one_category_is_undefined() {
        let units = vec![vec!['A', 'A'], vec!['A', 'A', 'A']];
        assert_eq!(nominal_alpha(&units), Err(AlphaError::UndefinedAlpha));
    }

    #[test]
    fn total_disagreement_is_negative() {
        let units = vec![vec!['A', 'B'], vec!['B', 'A'], vec!['A', 'B']];
        // n = 6, n_A = n_B = 3, all 6 ordered pairs disagree: 1 - 5 * 6 / 18
        let alpha = nominal_alpha(&units).unwrap();
        assert!((alpha - (1.0 - 5.0 * 6.0 / 18.0)).abs() < 1e-12, "{alpha}");
        assert!(alpha < 0.0);
    }
}
