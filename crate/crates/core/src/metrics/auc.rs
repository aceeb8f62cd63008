use crate::error::{Error, Result};

/// Area under the ROC curve in its Mann-Whitney form: the share of
/// (positive, negative) pairs the scores order correctly, ties counting
/// one half.
///
/// Computed from tie-averaged ranks in `O(n log n)`.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|y| **y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::AucUndefined("labels contain a single class".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based ranks of the positives, ties sharing their mean rank.
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j + 1) as f64 / 2.0;
        let pos_in_block = order[i..j].iter().filter(|&&k| labels[k]).count();
        pos_rank_sum += avg_rank * pos_in_block as f64;
        i = j;
    }
    let n_pos = n_pos as f64;
    let u = pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_separation() {
        let v = auc(&[0.9, 0.8, 0.3, 0.2], &[true, true, false, false]).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn half_the_pairs() {
        let v = auc(&[0.9, 0.4, 0.6, 0.2], &[true, false, false, true]).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn constant_scores() {
        assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, false]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(matches!(auc(&[0.1, 0.2], &[true, true]), Err(Error::AucUndefined(_))));
    }

    proptest! {
        #[test]
        fn negation_complements(raw in prop::collection::vec((0u32..1_000_000, any::<bool>()), 2..80)) {
            let mut seen = std::collections::HashSet::new();
            let pairs: Vec<_> = raw.into_iter().filter(|(s, _)| seen.insert(*s)).collect();
            let labels: Vec<bool> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(labels.iter().any(|y| *y) && labels.iter().any(|y| !*y));
            let scores: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let total = auc(&scores, &labels).unwrap() + auc(&neg, &labels).unwrap();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
