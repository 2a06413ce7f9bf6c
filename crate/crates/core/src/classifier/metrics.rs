use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

/// Precision and recall of a predicted set against a gold set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRReport<T> {
    pub precision: T,
    pub recall: T,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Precision is 1 when nothing was predicted; recall is 1 when nothing was
/// expected.
pub fn evaluate_pr<T: Scalar, K: Ord>(predicted: &BTreeSet<K>, gold: &BTreeSet<K>) -> PRReport<T> {
    let tp = predicted.intersection(gold).count();
    let fp = predicted.len() - tp;
    let fn_ = gold.len() - tp;
    let ratio = |num: usize, den: usize| if den == 0 { T::one() } else { T::from_ratio(num, den) };
    PRReport {
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
    }
}
