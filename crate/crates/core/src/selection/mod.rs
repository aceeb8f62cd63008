//! Mechanisms that rank historical models for an unlabeled testing period.
//!
//! Every mechanism returns a full permutation of the candidate ids. Equal
//! scores are broken toward the more recent model (higher id).

mod baselines;
mod confidence;
mod hausdorff;
mod laf;
mod similarity;
mod temporal;

pub use baselines::{rank_oracle, rank_periodic, rank_stationary};
pub use confidence::{confidence, rank_crc};
pub use hausdorff::{hausdorff_distance, hausdorff_distance_capped, subsample, DEFAULT_HAUSDORFF_CAP};
pub use laf::{majority_pseudo_labels, one_coin_em, rank_laf, EmFit, PseudoLabels, VOTE_THRESHOLD};
pub use similarity::{choose_reference_period, rank_rsbm, rank_sbm, ReferenceChoice};
pub use temporal::{rank_rtbm, rank_tbm};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{PeriodizedDataset, RobustScaler, Sample};
use crate::error::{Error, Result};
use crate::registry::{ModelRecord, TrainingWindow};

/// A historical model as seen by the mechanisms.
pub trait Candidate: Sync {
    fn model_id(&self) -> usize;
    fn window(&self) -> TrainingWindow;
    /// Positive-class probabilities for raw (unscaled) samples.
    fn score(&self, samples: &[Sample]) -> Result<Vec<f64>>;
    /// Scaler used to put samples in a common space for distance
    /// computations.
    fn scaler(&self) -> Option<&RobustScaler> {
        None
    }
}

impl Candidate for ModelRecord {
    fn model_id(&self) -> usize {
        self.model_id
    }

    fn window(&self) -> TrainingWindow {
        self.window
    }

    fn score(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        self.scores(samples)
    }

    fn scaler(&self) -> Option<&RobustScaler> {
        Some(&self.scaler)
    }
}

impl<C: Candidate> Candidate for &C {
    fn model_id(&self) -> usize {
        (**self).model_id()
    }

    fn window(&self) -> TrainingWindow {
        (**self).window()
    }

    fn score(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        (**self).score(samples)
    }

    fn scaler(&self) -> Option<&RobustScaler> {
        (**self).scaler()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Stationary,
    Periodic,
    Oracle,
    Tbm,
    Rtbm,
    Sbm,
    Rsbm,
    Crc,
    Laf,
}

impl Mechanism {
    pub const ALL: [Mechanism; 9] = [
        Mechanism::Stationary,
        Mechanism::Periodic,
        Mechanism::Oracle,
        Mechanism::Tbm,
        Mechanism::Rtbm,
        Mechanism::Sbm,
        Mechanism::Rsbm,
        Mechanism::Crc,
        Mechanism::Laf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Stationary => "stationary",
            Mechanism::Periodic => "periodic",
            Mechanism::Oracle => "oracle",
            Mechanism::Tbm => "tbm",
            Mechanism::Rtbm => "rtbm",
            Mechanism::Sbm => "sbm",
            Mechanism::Rsbm => "rsbm",
            Mechanism::Crc => "crc",
            Mechanism::Laf => "laf",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mechanism `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub model_id: usize,
    /// Estimated performance; `None` for entries placed by rule.
    pub score: Option<f64>,
    /// Trained on the period used to score it.
    pub leaky: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankingFlags {
    /// Scores were unavailable and recency order was returned.
    pub recency_fallback: bool,
    /// LaF found no discriminative sample.
    pub laf_fallback: bool,
    /// Majority votes that were ties.
    pub vote_ties: usize,
    /// rTBM moved the newest model to the top.
    pub promoted: bool,
    /// Period the scores were computed on (TBM, SBM).
    pub reference_period: Option<usize>,
}

impl fmt::Display for RankingFlags {
    /// `;`-separated, empty when no flag is set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.recency_fallback {
            parts.push("recency_fallback".to_string());
        }
        if self.laf_fallback {
            parts.push("laf_fallback".to_string());
        }
        if self.vote_ties > 0 {
            parts.push(format!("vote_ties={}", self.vote_ties));
        }
        if self.promoted {
            parts.push("promoted".to_string());
        }
        if let Some(p) = self.reference_period {
            parts.push(format!("ref={p}"));
        }
        f.write_str(&parts.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub mechanism: Mechanism,
    /// Rank 1 first.
    pub entries: Vec<RankEntry>,
    pub flags: RankingFlags,
}

impl Ranking {
    pub fn order(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.model_id).collect()
    }

    pub fn top(&self) -> usize {
        self.entries[0].model_id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Sort `(id, score)` descending by score, newer id first on ties.
pub(crate) fn by_score(mut scored: Vec<(usize, f64)>, leaky: bool) -> Vec<RankEntry> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.0.cmp(&a.0)));
    scored
        .into_iter()
        .map(|(model_id, s)| RankEntry {
            model_id,
            score: Some(s),
            leaky,
        })
        .collect()
}

/// Newest first, unscored.
pub(crate) fn by_recency(mut ids: Vec<usize>, leaky: bool) -> Vec<RankEntry> {
    ids.sort_unstable_by(|a, b| b.cmp(a));
    ids.into_iter()
        .map(|model_id| RankEntry {
            model_id,
            score: None,
            leaky,
        })
        .collect()
}

pub(crate) fn require_candidates<C: Candidate>(candidates: &[C]) -> Result<()> {
    if candidates.is_empty() {
        Err(Error::Empty("registry".into()))
    } else {
        Ok(())
    }
}

/// Unlabeled samples of the period being predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct TestContext {
    period: usize,
    samples: Vec<Sample>,
}

impl TestContext {
    /// Labels are dropped.
    pub fn new(period: usize, samples: &[Sample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("test context".into()));
        }
        Ok(TestContext {
            period,
            samples: samples.iter().map(Sample::hidden).collect(),
        })
    }

    pub fn from_dataset(dataset: &PeriodizedDataset, t: usize) -> Result<Self> {
        TestContext::new(t, dataset.period(t))
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
}

/// Labeled periods `1..t`.
#[derive(Debug, Clone, Copy)]
pub struct HistoryView<'a> {
    periods: &'a [Vec<Sample>],
}

impl<'a> HistoryView<'a> {
    pub fn new(periods: &'a [Vec<Sample>]) -> Result<Self> {
        for (i, p) in periods.iter().enumerate() {
            if p.iter().any(|s| s.label.is_none()) {
                return Err(Error::MissingLabel {
                    context: Some(format!("history period {}", i + 1)),
                });
            }
        }
        Ok(HistoryView { periods })
    }

    /// History before testing period `t`.
    pub fn before(dataset: &'a PeriodizedDataset, t: usize) -> Self {
        HistoryView {
            periods: &dataset.periods()[..t - 1],
        }
    }

    /// Most recent labeled period id (0 when empty).
    pub fn last(&self) -> usize {
        self.periods.len()
    }

    pub fn period(&self, p: usize) -> &'a [Sample] {
        &self.periods[p - 1]
    }
}

/// Knobs for the distance-based mechanisms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOptions {
    pub hausdorff_cap: usize,
    pub seed: u64,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            hausdorff_cap: DEFAULT_HAUSDORFF_CAP,
            seed: 0,
        }
    }
}

/// Run `mechanism`. `truth` (the test labels) is read by the oracle only.
pub fn rank<C: Candidate>(
    mechanism: Mechanism,
    candidates: &[C],
    history: HistoryView<'_>,
    context: &TestContext,
    truth: Option<&[Sample]>,
    options: &SelectionOptions,
) -> Result<Ranking> {
    match mechanism {
        Mechanism::Stationary => rank_stationary(candidates),
        Mechanism::Periodic => rank_periodic(candidates),
        Mechanism::Oracle => {
            let labeled = truth.ok_or_else(|| {
                Error::InvalidArgument("oracle needs the test labels".into())
            })?;
            rank_oracle(candidates, labeled)
        }
        Mechanism::Tbm => rank_tbm(candidates, history),
        Mechanism::Rtbm => rank_rtbm(candidates, history),
        Mechanism::Sbm => rank_sbm(candidates, history, context, options),
        Mechanism::Rsbm => rank_rsbm(candidates, history, context, options),
        Mechanism::Crc => rank_crc(candidates, context),
        Mechanism::Laf => rank_laf(candidates, context),
    }
}
