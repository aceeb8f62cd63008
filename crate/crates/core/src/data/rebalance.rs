use rand::seq::index;

use super::{class_counts, Sample};
use crate::error::{Error, Result};
use crate::seed;

/// Share of the rarer class. Errors on unlabeled samples.
pub fn minority_rate(samples: &[Sample]) -> Result<f64> {
    let (neg, pos) = class_counts(samples)?;
    let total = neg + pos;
    if total == 0 {
        return Err(Error::Empty("samples".into()));
    }
    Ok(neg.min(pos) as f64 / total as f64)
}

/// Randomly drop majority-class samples until at most
/// `ceil(ratio * minority)` of them remain.
///
/// All minority samples are kept and the relative order of the survivors
/// matches the input. When the two classes are the same size the
/// negatives are treated as the majority.
pub fn downsample_majority(samples: &[Sample], ratio: f64, rng_seed: u64) -> Result<Vec<Sample>> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio must be > 0, got {ratio}")));
    }
    let (neg, pos) = class_counts(samples)?;
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let majority_label = neg < pos;
    let minority = neg.min(pos);
    let majority = neg.max(pos);
    let target = ((ratio * minority as f64).ceil() as usize).min(majority);
    if target == majority {
        return Ok(samples.to_vec());
    }

    let majority_idx: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == Some(majority_label))
        .map(|(i, _)| i)
        .collect();
    let mut rng = seed::rng(rng_seed);
    let mut keep = vec![false; samples.len()];
    for k in index::sample(&mut rng, majority, target) {
        keep[majority_idx[k]] = true;
    }
    Ok(samples
        .iter()
        .zip(&keep)
        .filter(|(s, k)| **k || s.label != Some(majority_label))
        .map(|(s, _)| s.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream(neg: usize, pos: usize) -> Vec<Sample> {
        (0..neg)
            .map(|i| Sample::labeled(vec![i as f64], false))
            .chain((0..pos).map(|i| Sample::labeled(vec![-(i as f64) - 1.0], true)))
            .collect()
    }

    #[test]
    fn thousand_to_ten() {
        let out = downsample_majority(&stream(1000, 10), 10.0, 3).unwrap();
        let (neg, pos) = class_counts(&out).unwrap();
        assert_eq!((neg, pos), (100, 10));
    }

    #[test]
    fn below_cap_is_unchanged() {
        let input = stream(50, 10);
        assert_eq!(downsample_majority(&input, 10.0, 3).unwrap(), input);
    }

    #[test]
    fn at_ratio_is_fixed_point() {
        let input = stream(100, 10);
        assert_eq!(downsample_majority(&input, 10.0, 9).unwrap(), input);
    }

    #[test]
    fn single_class_errors() {
        assert!(matches!(
            downsample_majority(&stream(5, 0), 10.0, 1),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let input = stream(500, 7);
        let a = downsample_majority(&input, 10.0, 42).unwrap();
        let b = downsample_majority(&input, 10.0, 42).unwrap();
        let c = downsample_majority(&input, 10.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn positive_majority_is_handled() {
        let out = downsample_majority(&stream(3, 90), 10.0, 1).unwrap();
        assert_eq!(class_counts(&out).unwrap(), (3, 30));
    }

    proptest! {
        #[test]
        fn keeps_minority_and_is_idempotent(neg in 1usize..300, pos in 1usize..40, seed in any::<u64>()) {
            let input = stream(neg, pos);
            let once = downsample_majority(&input, 10.0, seed).unwrap();
            let minority_label = neg >= pos;
            let before: Vec<_> = input.iter().filter(|s| s.label == Some(minority_label)).collect();
            let after: Vec<_> = once.iter().filter(|s| s.label == Some(minority_label)).collect();
            prop_assert_eq!(before, after);
            let twice = downsample_majority(&once, 10.0, seed.wrapping_add(1)).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
