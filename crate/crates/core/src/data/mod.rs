//! Labeled streams split into time periods.
//!
//! Periods are numbered from 1. The first half of the periods is the
//! initial training data, the second half arrives one period at a time for
//! testing.

mod io;
mod rebalance;
mod scaler;
mod synthetic;

pub use io::{read_csv, write_csv};
pub use rebalance::{downsample_majority, minority_rate};
pub use scaler::{apply_scaler, fit_scaler, quantile, RobustScaler};
pub use synthetic::{generate_drift_stream, DriftKind, DriftScenario, Regime};

use crate::error::{Error, Result};

/// One observation. `label` is `Some(true)` for the positive (failure)
/// class.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: Option<bool>,
}

impl Sample {
    pub fn labeled(features: Vec<f64>, label: bool) -> Self {
        Sample {
            features,
            label: Some(label),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Sample {
            features,
            label: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Copy without the label.
    pub fn hidden(&self) -> Self {
        Sample::unlabeled(self.features.clone())
    }
}

/// Labels of a sample slice; errors if any is missing.
pub fn labels_of(samples: &[Sample]) -> Result<Vec<bool>> {
    samples
        .iter()
        .map(|s| s.label.ok_or(Error::MissingLabel { context: None }))
        .collect()
}

/// Counts of (negatives, positives); errors on unlabeled samples.
pub fn class_counts(samples: &[Sample]) -> Result<(usize, usize)> {
    let mut pos = 0;
    let mut neg = 0;
    for s in samples {
        match s.label {
            Some(true) => pos += 1,
            Some(false) => neg += 1,
            None => return Err(Error::MissingLabel { context: None }),
        }
    }
    Ok((neg, pos))
}

/// An ordered, fully labeled stream of periods.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizedDataset {
    periods: Vec<Vec<Sample>>,
    feature_names: Vec<String>,
}

impl PeriodizedDataset {
    /// Validate and wrap already-grouped periods (index 0 is period 1).
    pub fn from_periods(periods: Vec<Vec<Sample>>, feature_names: Vec<String>) -> Result<Self> {
        if periods.len() < 2 {
            return Err(Error::TooFewPeriods);
        }
        let dim = feature_names.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, period) in periods.iter().enumerate() {
            if period.is_empty() {
                return Err(Error::EmptyPeriod(i + 1));
            }
            for s in period {
                if s.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: s.dim(),
                    });
                }
                if s.label.is_none() {
                    return Err(Error::MissingLabel {
                        context: Some(format!("period {}", i + 1)),
                    });
                }
            }
        }
        Ok(PeriodizedDataset {
            periods,
            feature_names,
        })
    }

    pub fn period_count(&self) -> usize {
        self.periods.len()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Samples of period `p` (1-based). Panics if out of range.
    pub fn period(&self, p: usize) -> &[Sample] {
        &self.periods[p - 1]
    }

    pub fn periods(&self) -> &[Vec<Sample>] {
        &self.periods
    }

    /// Concatenated samples of periods `start..=end`.
    pub fn span(&self, start: usize, end: usize) -> Vec<Sample> {
        self.periods[start - 1..end].iter().flatten().cloned().collect()
    }

    /// Number of periods in the initial training half.
    pub fn half(&self) -> usize {
        self.periods.len() / 2
    }

    pub fn sample_count(&self) -> usize {
        self.periods.iter().map(Vec::len).sum()
    }
}

/// Group `(period_id, sample)` records into a dataset.
///
/// Ids must cover a contiguous integer range; they are renumbered so the
/// smallest id becomes period 1. Record order within a period is kept.
pub fn segment_by_period(
    records: Vec<(i64, Sample)>,
    feature_names: Vec<String>,
) -> Result<PeriodizedDataset> {
    if records.is_empty() {
        return Err(Error::TooFewPeriods);
    }
    let dim = feature_names.len();
    let mut ids: Vec<i64> = records.iter().map(|(p, _)| *p).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::TooFewPeriods);
    }
    for w in ids.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::PeriodGap {
                low: w[0],
                high: w[1],
                missing: w[0] + 1,
            });
        }
    }
    let first = ids[0];
    let mut periods: Vec<Vec<Sample>> = vec![Vec::new(); ids.len()];
    for (pid, sample) in records {
        if sample.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sample.dim(),
            });
        }
        if sample.label.is_none() {
            return Err(Error::MissingLabel {
                context: Some(format!("period id {pid}")),
            });
        }
        periods[(pid - first) as usize].push(sample);
    }
    PeriodizedDataset::from_periods(periods, feature_names)
}

/// Default feature names `f1..fd`.
pub fn default_feature_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("f{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: i64, x: f64, y: bool) -> (i64, Sample) {
        (p, Sample::labeled(vec![x], y))
    }

    #[test]
    fn segments_28_daily_groups() {
        let mut records = Vec::new();
        for day in 1..=28 {
            for j in 0..3 {
                records.push(rec(day, (day * 10 + j) as f64, j == 0));
            }
        }
        let ds = segment_by_period(records, default_feature_names(1)).unwrap();
        assert_eq!(ds.period_count(), 28);
        assert_eq!(ds.half(), 14);
        assert_eq!(ds.sample_count(), 84);
        assert_eq!(ds.period(5)[1].features, vec![51.0]);
    }

    #[test]
    fn single_period_is_rejected() {
        let records = vec![rec(3, 0.0, true), rec(3, 1.0, false)];
        let err = segment_by_period(records, default_feature_names(1)).unwrap_err();
        assert_eq!(err.to_string(), "fewer than 2 periods");
    }

    #[test]
    fn gap_is_rejected() {
        let records = vec![rec(1, 0.0, true), rec(2, 1.0, false), rec(4, 2.0, true)];
        let err = segment_by_period(records, default_feature_names(1)).unwrap_err();
        assert!(matches!(err, Error::PeriodGap { missing: 3, .. }));
        assert!(err.to_string().starts_with("gap in period ids"));
    }

    #[test]
    fn dimension_and_label_checks() {
        let records = vec![rec(1, 0.0, true), (2, Sample::labeled(vec![1.0, 2.0], false))];
        assert!(matches!(
            segment_by_period(records, default_feature_names(1)),
            Err(Error::DimensionMismatch { .. })
        ));
        let records = vec![rec(1, 0.0, true), (2, Sample::unlabeled(vec![1.0]))];
        assert!(matches!(
            segment_by_period(records, default_feature_names(1)),
            Err(Error::MissingLabel { .. })
        ));
    }

    #[test]
    fn ids_are_renumbered_from_one() {
        let records = vec![rec(11, 0.0, true), rec(10, 1.0, false), rec(12, 2.0, true)];
        let ds = segment_by_period(records, default_feature_names(1)).unwrap();
        assert_eq!(ds.period(1)[0].features, vec![1.0]);
        assert_eq!(ds.period(3)[0].features, vec![2.0]);
    }

    #[test]
    fn empty_period_rejected_by_from_periods() {
        let periods = vec![vec![Sample::labeled(vec![0.0], true)], vec![]];
        assert!(matches!(
            PeriodizedDataset::from_periods(periods, default_feature_names(1)),
            Err(Error::EmptyPeriod(2))
        ));
    }
}
