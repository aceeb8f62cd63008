//! Synthetic drifting streams for desk-scale experiments.
//!
//! Each regime is a pair of spherical Gaussians, one per class. A scenario
//! says which regime (or blend of regimes) generates every period.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{default_feature_names, PeriodizedDataset, Sample};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    /// One regime throughout.
    None,
    /// First regime up to the midpoint, second regime after.
    Abrupt,
    /// Class means slide linearly from the first regime to the second.
    Gradual,
    /// Regimes repeat with period `cycle_length`.
    Cyclic,
}

/// Class-conditional Gaussian parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub negative_mean: Vec<f64>,
    pub positive_mean: Vec<f64>,
    #[serde(default = "one")]
    pub negative_std: f64,
    #[serde(default = "one")]
    pub positive_std: f64,
}

fn one() -> f64 {
    1.0
}

fn default_dim() -> usize {
    8
}

fn default_separation() -> f64 {
    2.0
}

fn default_shift() -> f64 {
    3.0
}

/// Scenario description, loadable from TOML.
///
/// When `regimes` is empty, `dim`, `separation` and `regime_shift` build a
/// default family: regime `k` centers its negatives at `regime_shift * k`
/// on the last feature and offsets its positives by `separation` along
/// feature `k mod (dim - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftScenario {
    pub kind: DriftKind,
    pub period_count: usize,
    pub samples_per_period: usize,
    pub positive_rate: f64,
    #[serde(default)]
    pub cycle_length: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default = "default_shift")]
    pub regime_shift: f64,
    #[serde(default)]
    pub regimes: Vec<Regime>,
}

impl DriftScenario {
    pub fn new(kind: DriftKind, period_count: usize, samples_per_period: usize, positive_rate: f64) -> Self {
        DriftScenario {
            kind,
            period_count,
            samples_per_period,
            positive_rate,
            cycle_length: if kind == DriftKind::Cyclic { Some(2) } else { None },
            seed: 0,
            dim: default_dim(),
            separation: default_separation(),
            regime_shift: default_shift(),
            regimes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
    }

    fn regime_count(&self) -> usize {
        match self.kind {
            DriftKind::None => 1,
            DriftKind::Abrupt | DriftKind::Gradual => 2,
            DriftKind::Cyclic => self.cycle_length.unwrap_or(0),
        }
    }

    fn feature_dim(&self) -> usize {
        self.regimes
            .first()
            .map(|r| r.negative_mean.len())
            .unwrap_or(self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.period_count < 2 {
            return bad("period_count must be >= 2".into());
        }
        if self.samples_per_period == 0 {
            return bad("samples_per_period must be > 0".into());
        }
        if !(self.positive_rate > 0.0 && self.positive_rate < 1.0) {
            return bad(format!("positive_rate must lie in (0, 1), got {}", self.positive_rate));
        }
        let positives = self.positive_rate * self.samples_per_period as f64;
        if positives < 5.0 {
            return bad(format!(
                "positive_rate * samples_per_period = {positives} < 5"
            ));
        }
        if self.samples_per_period - self.positives_per_period() < 1 {
            return bad("no negatives left in a period".into());
        }
        if self.kind == DriftKind::Cyclic {
            match self.cycle_length {
                Some(c) if c >= 2 => {}
                _ => return bad("cyclic drift requires cycle_length >= 2".into()),
            }
        }
        if self.regimes.is_empty() {
            if self.dim < 2 {
                return bad("dim must be >= 2".into());
            }
        } else {
            if self.regimes.len() != self.regime_count() {
                return bad(format!(
                    "{:?} drift needs {} regimes, got {}",
                    self.kind,
                    self.regime_count(),
                    self.regimes.len()
                ));
            }
            let d = self.feature_dim();
            if d == 0 {
                return bad("regime means are empty".into());
            }
            for r in &self.regimes {
                if r.negative_mean.len() != d || r.positive_mean.len() != d {
                    return bad("regime means differ in dimension".into());
                }
                if !(r.negative_std > 0.0 && r.positive_std > 0.0) {
                    return bad("regime standard deviations must be > 0".into());
                }
            }
        }
        Ok(())
    }

    fn positives_per_period(&self) -> usize {
        (self.positive_rate * self.samples_per_period as f64).round() as usize
    }

    /// The explicit regimes, or the default family.
    pub fn resolved_regimes(&self) -> Vec<Regime> {
        if !self.regimes.is_empty() {
            return self.regimes.clone();
        }
        let d = self.dim;
        (0..self.regime_count())
            .map(|k| {
                let mut negative_mean = vec![0.0; d];
                negative_mean[d - 1] = self.regime_shift * k as f64;
                let mut positive_mean = negative_mean.clone();
                positive_mean[k % (d - 1)] += self.separation;
                Regime {
                    negative_mean,
                    positive_mean,
                    negative_std: 1.0,
                    positive_std: 1.0,
                }
            })
            .collect()
    }

    /// Regime index of period `p` for non-gradual kinds.
    pub fn regime_of(&self, p: usize) -> usize {
        match self.kind {
            DriftKind::None | DriftKind::Gradual => 0,
            DriftKind::Abrupt => usize::from(p > self.period_count / 2),
            DriftKind::Cyclic => (p - 1) % self.cycle_length.unwrap_or(1),
        }
    }

    /// Parameters actually used for period `p`.
    pub fn period_regime(&self, p: usize) -> Regime {
        let regimes = self.resolved_regimes();
        match self.kind {
            DriftKind::Gradual => {
                let a = (p - 1) as f64 / (self.period_count - 1) as f64;
                let lerp = |x: &[f64], y: &[f64]| -> Vec<f64> {
                    x.iter().zip(y).map(|(u, v)| u + a * (v - u)).collect()
                };
                let (r0, r1) = (&regimes[0], &regimes[1]);
                Regime {
                    negative_mean: lerp(&r0.negative_mean, &r1.negative_mean),
                    positive_mean: lerp(&r0.positive_mean, &r1.positive_mean),
                    negative_std: r0.negative_std + a * (r1.negative_std - r0.negative_std),
                    positive_std: r0.positive_std + a * (r1.positive_std - r0.positive_std),
                }
            }
            _ => regimes[self.regime_of(p)].clone(),
        }
    }
}

fn draw(rng: &mut impl Rng, mean: &[f64], std: f64) -> Vec<f64> {
    mean.iter()
        .map(|m| m + std * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Generate the stream described by `scenario`. Each period draws from
/// its own seed stream, so equal seeds give equal datasets.
pub fn generate_drift_stream(scenario: &DriftScenario) -> Result<PeriodizedDataset> {
    scenario.validate()?;
    let n = scenario.samples_per_period;
    let n_pos = scenario.positives_per_period();
    let periods = (1..=scenario.period_count)
        .map(|p| {
            let regime = scenario.period_regime(p);
            let mut rng = seed::rng(seed::derive(scenario.seed, p as u64));
            let mut labels: Vec<bool> = (0..n).map(|i| i < n_pos).collect();
            labels.shuffle(&mut rng);
            labels
                .into_iter()
                .map(|y| {
                    let x = if y {
                        draw(&mut rng, &regime.positive_mean, regime.positive_std)
                    } else {
                        draw(&mut rng, &regime.negative_mean, regime.negative_std)
                    };
                    Sample::labeled(x, y)
                })
                .collect()
        })
        .collect();
    PeriodizedDataset::from_periods(periods, default_feature_names(scenario.feature_dim()))
}
