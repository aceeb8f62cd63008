use super::Sample;
use crate::error::{Error, Result};

/// Per-feature median centering and interquartile scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustScaler {
    median: Vec<f64>,
    iqr: Vec<f64>,
}

/// Quantile of sorted data by linear interpolation between closest ranks
/// (position `(n - 1) * q`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl RobustScaler {
    pub fn median(&self) -> &[f64] {
        &self.median
    }

    /// q75 - q25 per feature.
    pub fn quantile_range(&self) -> &[f64] {
        &self.iqr
    }

    pub fn dim(&self) -> usize {
        self.median.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(x
            .iter()
            .zip(self.median.iter().zip(&self.iqr))
            .map(|(v, (m, r))| {
                // zero spread: center only
                let div = if *r > 0.0 { *r } else { 1.0 };
                (v - m) / div
            })
            .collect())
    }
}

pub fn fit_scaler(samples: &[Sample]) -> Result<RobustScaler> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughSamples(format!(
            "scaler needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].dim();
    let mut median = Vec::with_capacity(dim);
    let mut iqr = Vec::with_capacity(dim);
    let mut column = Vec::with_capacity(samples.len());
    for j in 0..dim {
        column.clear();
        for s in samples {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            column.push(s.features[j]);
        }
        column.sort_by(f64::total_cmp);
        median.push(quantile(&column, 0.5));
        iqr.push((quantile(&column, 0.75) - quantile(&column, 0.25)).max(0.0));
    }
    Ok(RobustScaler { median, iqr })
}

/// Scale every sample; labels are carried over unchanged.
pub fn apply_scaler(scaler: &RobustScaler, samples: &[Sample]) -> Result<Vec<Sample>> {
    samples
        .iter()
        .map(|s| {
            Ok(Sample {
                features: scaler.transform(&s.features)?,
                label: s.label,
            })
        })
        .collect()
}
